/**
 * The guided proposal flow.
 *
 * The client performs no admission logic of its own: it submits the draft
 * as the user wrote it and turns the server's verdict into the next form.
 * A needs_connection verdict renders the connection picker (choose an
 * existing object plus a generalization/corrective type, resubmit); a
 * complete-redundancy conflict renders the add-belief prompt; acceptance
 * renders the new block. Nothing is shown optimistically.
 */

import {
  ApiClient,
  type AdmissionResult,
  type Conflict,
  type StatementDraft,
} from "./api.js";
import {
  renderBeliefPrompt,
  renderConflictList,
  renderConnectionPicker,
  renderSuccess,
} from "./render.js";

export const CONNECTION_TYPES = [
  "kb#generalization",
  "kb#extended_generalization",
  "kb#specialization",
  "kb#correction",
  "kb#corrective_restriction",
  "kb#corrective_generalization",
];

export type ProposePhase =
  | { phase: "editing" }
  | { phase: "needs_connection"; requiredAction: string }
  | {
      phase: "conflict";
      conflicts: Conflict[];
      requiredAction: string;
      duplicateOf: string | null;
    }
  | { phase: "accepted"; statementId: string; warnings: Conflict[] }
  | { phase: "believed"; object: string; believers: string[] };

export class ProposeController {
  state: ProposePhase = { phase: "editing" };
  draft: StatementDraft | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly candidateProvider: (draft: StatementDraft) => Promise<string[]>,
  ) {}

  async submit(draft: StatementDraft): Promise<ProposePhase> {
    this.draft = draft;
    return this.apply(await this.api.propose(draft));
  }

  /** Resubmission after the picker: same draft plus the chosen connection. */
  async resubmitWith(connectionType: string, target: string): Promise<ProposePhase> {
    if (!this.draft) throw new Error("nothing to resubmit");
    const draft: StatementDraft = {
      ...this.draft,
      connections: [...this.draft.connections, [connectionType, target]],
    };
    this.draft = draft;
    return this.apply(await this.api.propose(draft));
  }

  /** The loss-less alternative to re-asserting a duplicate. */
  async acceptAsBelief(): Promise<ProposePhase> {
    if (this.state.phase !== "conflict" || this.state.duplicateOf === null) {
      throw new Error("no duplicate to believe in");
    }
    if (!this.draft) throw new Error("no draft");
    const believers = await this.api.addBelief(
      this.draft.user,
      this.state.duplicateOf,
    );
    this.state = {
      phase: "believed",
      object: this.state.duplicateOf,
      believers,
    };
    return this.state;
  }

  private apply(result: AdmissionResult): ProposePhase {
    switch (result.outcome) {
      case "accepted":
        this.state = {
          phase: "accepted",
          statementId: result.statement_id ?? "",
          warnings: result.conflicts,
        };
        break;
      case "needs_connection":
        this.state = {
          phase: "needs_connection",
          requiredAction: result.required_action,
        };
        break;
      case "conflict_detected": {
        const duplicate = result.conflicts.find(
          (c) => c.kind === "complete-redundancy",
        );
        this.state = {
          phase: "conflict",
          conflicts: result.conflicts,
          requiredAction: result.required_action,
          duplicateOf: duplicate ? duplicate.object : null,
        };
        break;
      }
    }
    return this.state;
  }

  async render(): Promise<string> {
    switch (this.state.phase) {
      case "editing":
        return "";
      case "needs_connection": {
        const candidates = this.draft
          ? await this.candidateProvider(this.draft)
          : [];
        return renderConnectionPicker(
          this.state.requiredAction,
          candidates,
          CONNECTION_TYPES,
        );
      }
      case "conflict": {
        const list = renderConflictList(this.state.conflicts);
        const duplicate = this.state.conflicts.find(
          (c) => c.kind === "complete-redundancy",
        );
        if (duplicate) {
          return list + renderBeliefPrompt(duplicate, this.state.requiredAction);
        }
        return list;
      }
      case "accepted":
        return renderSuccess(this.state.statementId);
      case "believed":
        return (
          `<div class="kb-block believed" data-object="${this.state.object}">` +
          `you now believe ${this.state.object} ` +
          `(believers: ${this.state.believers.join(", ")})</div>`
        );
    }
  }
}
