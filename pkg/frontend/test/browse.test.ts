import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { BrowseController } from "../src/browse.js";
import { FAMILY_COLORS } from "../src/colors.js";
import { StubServer, treePayload } from "./stub.js";

describe("hierarchy browsing", () => {
  it("renders nested blocks for the opened object", async () => {
    const stub = new StubServer();
    stub.on("GET", "/query", () => ({
      status: 200,
      body: treePayload("pm#Paris", ["pm#Paris_between_1950_and_1960"]),
    }));
    const browse = new BrowseController(new ApiClient(stub.transport()));
    await browse.open("pm#Paris");
    const html = browse.render();
    expect(html).toContain('data-object="pm#Paris"');
    expect(html).toContain('data-object="pm#Paris_between_1950_and_1960"');
    // children are colour-keyed by their specialization-family edge
    expect(html).toContain(FAMILY_COLORS.specialization);
  });

  it("issues exactly one depth-1 call per expand", async () => {
    const stub = new StubServer();
    stub.on("GET", "/query", (payload) => {
      void payload;
      return { status: 200, body: treePayload("wn#bird", ["wn#sparrow"]) };
    });
    const browse = new BrowseController(new ApiClient(stub.transport()));
    await browse.open("wn#bird");
    expect(stub.callsTo("GET", "/query").length).toBe(1);
    expect(stub.callsTo("GET", "/query")[0]?.path).toContain(
      encodeURIComponent("spec wn#bird 1"),
    );

    stub.calls = [];
    stub.on("GET", "/query", () => ({
      status: 200,
      body: treePayload("wn#sparrow", []),
    }));
    await browse.expand("wn#sparrow");
    expect(stub.callsTo("GET", "/query").length).toBe(1);
    // expanding an already-expanded node does not call again
    await browse.expand("wn#sparrow");
    expect(stub.callsTo("GET", "/query").length).toBe(1);
  });

  it("renders an inline not-found block for unknown ids", async () => {
    const stub = new StubServer(); // no handlers: everything 404s
    const browse = new BrowseController(new ApiClient(stub.transport()));
    await browse.open("zz#gone");
    const html = browse.render();
    expect(html).toContain("not-found");
    expect(html).toContain("zz#gone");
  });
});
