/**
 * Browser bootstrap: wires the controllers to the DOM. All state lives in
 * the controllers; this file only routes events and swaps innerHTML.
 */

import { ApiClient, fetchTransport, type StatementDraft } from "./api.js";
import { BrowseController } from "./browse.js";
import { CONNECTION_TYPES, ProposeController } from "./propose.js";
import { renderLegend } from "./render.js";
import { VoteController } from "./vote.js";

export function mount(root: HTMLElement, baseUrl = ""): void {
  const api = new ApiClient(fetchTransport(baseUrl));
  const browse = new BrowseController(api);
  const propose = new ProposeController(api, (draft) =>
    api.search(draft.informal ?? draft.fl ?? ""),
  );

  root.innerHTML = `
    <header>
      <input id="browse-input" placeholder="object id, e.g. kb#thing" value="kb#thing">
      <button id="browse-go">browse</button>
      ${renderLegend()}
    </header>
    <main id="tree"></main>
    <section id="propose">
      <h3>propose a statement</h3>
      <input id="p-user" placeholder="your user name">
      <input id="p-text" placeholder="informal text or FL like: every wn#bird agent: wn#flight">
      <label><input type="checkbox" id="p-formal"> treat as FL</label>
      <button id="p-submit">propose</button>
      <div id="p-result"></div>
    </section>
    <section id="vote-area"></section>
  `;

  const tree = root.querySelector("#tree") as HTMLElement;
  const result = root.querySelector("#p-result") as HTMLElement;
  const voteArea = root.querySelector("#vote-area") as HTMLElement;
  let vote: VoteController | null = null;

  const refreshTree = () => {
    tree.innerHTML = browse.render();
  };

  (root.querySelector("#browse-go") as HTMLElement).addEventListener("click", async () => {
    const id = (root.querySelector("#browse-input") as HTMLInputElement).value.trim();
    await browse.open(id);
    refreshTree();
  });

  const draftFromForm = (): StatementDraft => {
    const user = (root.querySelector("#p-user") as HTMLInputElement).value.trim();
    const text = (root.querySelector("#p-text") as HTMLInputElement).value.trim();
    const formal = (root.querySelector("#p-formal") as HTMLInputElement).checked;
    return formal
      ? { user, fl: text, connections: [] }
      : { user, informal: text, connections: [] };
  };

  (root.querySelector("#p-submit") as HTMLElement).addEventListener("click", async () => {
    await propose.submit(draftFromForm());
    result.innerHTML = await propose.render();
  });

  root.addEventListener("click", async (event) => {
    const el = event.target as HTMLElement;
    const action = el.dataset?.action;
    if (!action) return;
    event.preventDefault();
    if (action === "expand") {
      await browse.expand(el.dataset.object!);
      refreshTree();
    } else if (action === "vote") {
      vote = new VoteController(api, el.dataset.object!);
      voteArea.innerHTML = vote.render();
    } else if (action === "cast-vote") {
      if (!vote) return;
      const voter = (root.querySelector("#p-user") as HTMLInputElement).value.trim();
      const slider = voteArea.querySelector("input[name=value]") as HTMLInputElement;
      const outcome = await vote.cast(voter, Number(slider.value));
      voteArea.innerHTML = vote.render() + (outcome.ok ? "" : `<p>${outcome.error}</p>`);
    } else if (action === "add-belief") {
      await propose.acceptAsBelief();
      result.innerHTML = await propose.render();
    } else if (action === "resubmit") {
      const form = result.querySelector("[data-role=connection-picker]") as HTMLFormElement;
      const type = (form.querySelector("[name=connection-type]") as HTMLSelectElement).value;
      const target = (form.querySelector("[name=connection-target]") as HTMLSelectElement).value;
      await propose.resubmitWith(type || CONNECTION_TYPES[0]!, target);
      result.innerHTML = await propose.render();
    } else if (action === "propose") {
      (root.querySelector("#p-text") as HTMLInputElement).focus();
    }
  });
}
