import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { CONNECTION_TYPES, ProposeController } from "../src/propose.js";
import { StubServer, admission } from "./stub.js";

function controller(stub: StubServer, candidates: string[] = ["wn#bird"]) {
  const api = new ApiClient(stub.transport());
  return new ProposeController(api, async () => candidates);
}

describe("proposal flow", () => {
  it("renders the connection picker on a needs_connection verdict", async () => {
    const stub = new StubServer();
    stub.on("POST", "/statements", () => ({
      status: 422,
      body: admission("needs_connection", {
        required_action:
          "connect the statement to an existing object with a " +
          "generalization- or corrective-family relation",
      }),
    }));
    const flow = controller(stub);
    const state = await flow.submit({
      user: "joe",
      informal: "most healthy birds fly",
      connections: [],
    });
    expect(state.phase).toBe("needs_connection");
    const html = await flow.render();
    expect(html).toContain('data-role="connection-picker"');
    expect(html).toContain("wn#bird");
    for (const t of CONNECTION_TYPES) {
      expect(html).toContain(t);
    }
  });

  it("resubmits the same draft plus the picked connection", async () => {
    const stub = new StubServer();
    let call = 0;
    stub.on("POST", "/statements", (payload) => {
      call += 1;
      if (call === 1) return { status: 422, body: admission("needs_connection") };
      const draft = payload as { connections: Array<[string, string]> };
      expect(draft.connections).toEqual([
        ["kb#corrective_restriction", "s_john"],
      ]);
      return { status: 201, body: admission("accepted", { statement_id: "s_joe" }) };
    });
    const flow = controller(stub);
    await flow.submit({ user: "joe", informal: "claim", connections: [] });
    const state = await flow.resubmitWith("kb#corrective_restriction", "s_john");
    expect(state.phase).toBe("accepted");
    expect(await flow.render()).toContain("s_joe");
  });

  it("renders the add-belief prompt on a duplicate", async () => {
    const stub = new StubServer();
    stub.on("POST", "/statements", () => ({
      status: 422,
      body: admission("conflict_detected", {
        conflicts: [{ object: "s_john", kind: "complete-redundancy" }],
        required_action: "identical statement exists: add a belief on s_john instead",
      }),
    }));
    const flow = controller(stub);
    const state = await flow.submit({
      user: "joe",
      informal: "any bird is agent of a flight",
      connections: [["kb#generalization", "wn#bird"]],
    });
    expect(state.phase).toBe("conflict");
    const html = await flow.render();
    expect(html).toContain('data-role="belief-prompt"');
    expect(html).toContain("s_john");
  });

  it("drives add_belief through the API when the user accepts", async () => {
    const stub = new StubServer();
    stub.on("POST", "/statements", () => ({
      status: 422,
      body: admission("conflict_detected", {
        conflicts: [{ object: "s_john", kind: "complete-redundancy" }],
        required_action: "add a belief on s_john instead",
      }),
    }));
    stub.on("POST", "/beliefs", () => ({
      status: 200,
      body: { journal_position: 2, object: "s_john", believers: ["joe", "john"] },
    }));
    const flow = controller(stub);
    await flow.submit({ user: "joe", informal: "dup", connections: [] });
    const state = await flow.acceptAsBelief();
    expect(state.phase).toBe("believed");
    expect(stub.callsTo("POST", "/beliefs")[0]?.payload).toEqual({
      user: "joe",
      object: "s_john",
    });
  });

  it("performs no admission logic of its own", async () => {
    // even an obviously unconnected draft goes to the server verbatim;
    // the verdict shown is exactly the server's
    const stub = new StubServer();
    stub.on("POST", "/statements", () => ({
      status: 201,
      body: admission("accepted", { statement_id: "s_x" }),
    }));
    const flow = controller(stub);
    const state = await flow.submit({ user: "joe", informal: "x", connections: [] });
    expect(state.phase).toBe("accepted");
    expect(stub.callsTo("POST", "/statements").length).toBe(1);
    const sent = stub.callsTo("POST", "/statements")[0]?.payload as {
      connections: unknown[];
    };
    expect(sent.connections).toEqual([]);
  });

  it("lists partial redundancies as warnings on acceptance", async () => {
    const stub = new StubServer();
    stub.on("POST", "/statements", () => ({
      status: 201,
      body: admission("accepted", {
        statement_id: "s_new",
        conflicts: [{ object: "s_old", kind: "partial-redundancy" }],
      }),
    }));
    const flow = controller(stub);
    const state = await flow.submit({ user: "joe", informal: "y", connections: [] });
    expect(state.phase).toBe("accepted");
    if (state.phase === "accepted") {
      expect(state.warnings).toHaveLength(1);
    }
  });
});
