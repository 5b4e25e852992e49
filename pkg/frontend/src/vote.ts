/**
 * Voting widget: a slider in [-1, 1], a POST, then a badge that shows the
 * score the server computed. Out-of-range values never reach the wire; the
 * badge is never updated optimistically, only from the follow-up read.
 */

import { ApiClient, type Score } from "./api.js";
import { renderScoreBadge, renderVoteWidget } from "./render.js";

export interface VoteOutcome {
  ok: boolean;
  error?: string;
  score?: Score;
}

export class VoteController {
  lastScore: Score | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly objectId: string,
    readonly dimension: string = "usefulness",
  ) {}

  async cast(voter: string, value: number): Promise<VoteOutcome> {
    if (!Number.isFinite(value) || value < -1 || value > 1) {
      return { ok: false, error: `vote ${value} is outside [-1, 1]` };
    }
    await this.api.castVote(voter, this.objectId, this.dimension, value);
    const score = await this.api.score(this.objectId, this.dimension);
    this.lastScore = score;
    return { ok: true, score };
  }

  render(): string {
    const widget = renderVoteWidget(this.objectId, this.dimension);
    const badge = this.lastScore
      ? renderScoreBadge(this.objectId, this.lastScore)
      : "";
    return widget + badge;
  }
}
