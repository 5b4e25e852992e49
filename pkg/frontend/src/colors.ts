/**
 * Fixed background colour per relation family. The block colour is what
 * tells a beginner which kind of link scopes the element they are looking
 * at, so the mapping is deterministic and documented by the legend.
 */

export type Family =
  | "specialization"
  | "corrective"
  | "argumentation"
  | "mereological"
  | "descriptive";

export const FAMILY_COLORS: Record<Family, string> = {
  specialization: "#dbeafe", // blue: the hierarchy itself
  corrective: "#fee2e2", // red: something here corrects something else
  argumentation: "#fef9c3", // yellow: arguments and objections
  mereological: "#dcfce7", // green: part/subtask structure
  descriptive: "#f3e8ff", // purple: everything descriptive
};

export const NEUTRAL_COLOR = "#f4f4f5";

const FAMILY_BY_TYPE_NAME: Record<string, Family> = {
  subtype: "specialization",
  instance: "specialization",
  specialization: "specialization",
  generalization: "specialization",
  extended_generalization: "specialization",
  correction: "corrective",
  corrective_restriction: "corrective",
  corrective_generalization: "corrective",
  argument: "argumentation",
  objection: "argumentation",
  part: "mereological",
  physical_part: "mereological",
  subtask: "mereological",
};

export function familyOfType(typeId: string): Family {
  const name = typeId.split("#").pop() ?? typeId;
  return FAMILY_BY_TYPE_NAME[name] ?? "descriptive";
}

export function colorOfType(typeId: string | null): string {
  if (typeId === null) return NEUTRAL_COLOR;
  return FAMILY_COLORS[familyOfType(typeId)];
}

export function renderLegend(): string {
  const entries = (Object.keys(FAMILY_COLORS) as Family[])
    .map(
      (family) =>
        `<span class="legend-entry" style="background:${FAMILY_COLORS[family]}">` +
        `${family}</span>`,
    )
    .join(" ");
  return `<div class="legend" data-role="legend">${entries}</div>`;
}
