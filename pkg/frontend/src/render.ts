/**
 * HTML rendering: pure functions from view state to markup strings.
 *
 * Each object is one block whose background colour names the relation
 * family that scoped it into view; the block's menu carries the actions
 * (expand, propose under this, vote). Keeping these as string builders
 * lets the contract tests assert on exact structure without a DOM.
 */

import type { Conflict, RelationDto, Score, TreeNode } from "./api.js";
import { colorOfType, renderLegend } from "./colors.js";

export { renderLegend };

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function menu(objectId: string): string {
  const id = escapeHtml(objectId);
  return (
    `<span class="menu">` +
    `<button data-action="expand" data-object="${id}">expand</button>` +
    `<button data-action="propose" data-object="${id}">propose under</button>` +
    `<button data-action="vote" data-object="${id}">vote</button>` +
    `</span>`
  );
}

export function renderBlock(
  node: TreeNode,
  expanded: boolean,
  childrenHtml = "",
): string {
  const color = colorOfType(node.relation_type);
  const creators = node.creators.length
    ? `<span class="creators">(${node.creators.map(escapeHtml).join(", ")})</span>`
    : "";
  const annotations = node.annotations
    .map((rel) => renderRelationChip(rel))
    .join("");
  return (
    `<div class="kb-block" data-object="${escapeHtml(node.object)}" ` +
    `data-expanded="${expanded}" style="background:${color}">` +
    `<span class="label">${escapeHtml(node.object)}</span> ${creators}` +
    menu(node.object) +
    annotations +
    `<div class="children">${childrenHtml}</div>` +
    `</div>`
  );
}

export function renderRelationChip(rel: RelationDto): string {
  const name = rel.type.split("#").pop() ?? rel.type;
  return (
    `<span class="relation-chip" style="background:${colorOfType(rel.type)}">` +
    `${escapeHtml(name)}: ${escapeHtml(rel.dst)} (${escapeHtml(rel.creator)})</span>`
  );
}

export function renderNotFound(id: string): string {
  return (
    `<div class="kb-block not-found" data-object="${escapeHtml(id)}">` +
    `${escapeHtml(id)} was not found on this server</div>`
  );
}

export function renderConnectionPicker(
  requiredAction: string,
  candidates: string[],
  connectionTypes: string[],
): string {
  const options = candidates
    .map((c) => `<option value="${escapeHtml(c)}">${escapeHtml(c)}</option>`)
    .join("");
  const types = connectionTypes
    .map((t) => `<option value="${escapeHtml(t)}">${escapeHtml(t)}</option>`)
    .join("");
  return (
    `<form class="connection-picker" data-role="connection-picker">` +
    `<p class="hint">${escapeHtml(requiredAction)}</p>` +
    `<select name="connection-type">${types}</select>` +
    `<select name="connection-target">${options}</select>` +
    `<button data-action="resubmit">connect and resubmit</button>` +
    `</form>`
  );
}

export function renderBeliefPrompt(conflict: Conflict, requiredAction: string): string {
  return (
    `<div class="belief-prompt" data-role="belief-prompt" ` +
    `data-object="${escapeHtml(conflict.object)}">` +
    `<p>${escapeHtml(requiredAction)}</p>` +
    `<button data-action="add-belief" data-object="${escapeHtml(conflict.object)}">` +
    `add my belief to ${escapeHtml(conflict.object)}</button>` +
    `<button data-action="refine">refine my statement</button>` +
    `</div>`
  );
}

export function renderConflictList(conflicts: Conflict[]): string {
  const rows = conflicts
    .map(
      (c) =>
        `<li class="conflict conflict-${c.kind}">` +
        `${escapeHtml(c.kind)} with ${escapeHtml(c.object)}</li>`,
    )
    .join("");
  return `<ul class="conflicts">${rows}</ul>`;
}

export function renderScoreBadge(objectId: string, score: Score): string {
  return (
    `<span class="score-badge" data-role="score-badge" ` +
    `data-object="${escapeHtml(objectId)}" data-value="${score.value}">` +
    `${score.value.toFixed(2)} (${score.voter_count} voters)</span>`
  );
}

export function renderVoteWidget(objectId: string, dimension: string): string {
  const id = escapeHtml(objectId);
  return (
    `<form class="vote-widget" data-role="vote-widget" data-object="${id}">` +
    `<input type="range" name="value" min="-1" max="1" step="0.05" value="0">` +
    `<span class="dimension">${escapeHtml(dimension)}</span>` +
    `<button data-action="cast-vote" data-object="${id}">vote</button>` +
    `</form>`
  );
}

export function renderSuccess(statementId: string): string {
  return (
    `<div class="kb-block accepted" data-role="accepted" ` +
    `data-object="${escapeHtml(statementId)}">admitted as ` +
    `${escapeHtml(statementId)}</div>`
  );
}
