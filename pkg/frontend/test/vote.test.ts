import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { VoteController } from "../src/vote.js";
import { StubServer } from "./stub.js";

function detailWithScore(value: number, voters: number) {
  return {
    status: 200,
    body: {
      journal_position: 3,
      id: "s_x",
      object_kind: "statement",
      creator: "john",
      believers: ["john"],
      relations: [],
      scores: {
        usefulness: { value, voter_count: voters, argument_balance: 0 },
        originality: { value: 0, voter_count: 0, argument_balance: 0 },
      },
    },
  };
}

describe("vote widget", () => {
  it("posts the vote and shows the score the server computed", async () => {
    const stub = new StubServer();
    stub.on("POST", "/votes", () => ({
      status: 201,
      body: { journal_position: 2, vote: {} },
    }));
    stub.on("GET", "/objects/", () => detailWithScore(0.65, 2));
    const widget = new VoteController(new ApiClient(stub.transport()), "s_x");
    const outcome = await widget.cast("joe", 0.5);
    expect(outcome.ok).toBe(true);
    // badge value equals the score read back from the API, not the slider
    const html = widget.render();
    expect(html).toContain('data-value="0.65"');
    expect(html).toContain("0.65 (2 voters)");
    expect(stub.callsTo("POST", "/votes")[0]?.payload).toEqual({
      voter: "joe",
      object: "s_x",
      dimension: "usefulness",
      value: 0.5,
    });
  });

  it("blocks out-of-range votes before they reach the wire", async () => {
    const stub = new StubServer();
    const widget = new VoteController(new ApiClient(stub.transport()), "s_x");
    for (const bad of [1.5, -2, Number.NaN]) {
      const outcome = await widget.cast("joe", bad);
      expect(outcome.ok).toBe(false);
    }
    expect(stub.calls.length).toBe(0);
  });

  it("renders a slider bounded to [-1, 1]", () => {
    const stub = new StubServer();
    const widget = new VoteController(new ApiClient(stub.transport()), "s_x");
    const html = widget.render();
    expect(html).toContain('min="-1"');
    expect(html).toContain('max="1"');
  });
});
