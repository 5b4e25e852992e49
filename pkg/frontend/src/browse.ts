/**
 * Hierarchy browsing: nested blocks, expanded one level at a time.
 *
 * Expanding a node issues exactly one depth-1 hierarchy call for that
 * node; nothing is prefetched, nothing is cached across expands, and the
 * tree the user sees is always something the server said.
 */

import { ApiClient, ApiError, type TreeNode } from "./api.js";
import { renderBlock, renderNotFound } from "./render.js";

interface BrowseNode {
  node: TreeNode;
  expanded: boolean;
  children: string[];
}

export class BrowseController {
  private nodes = new Map<string, BrowseNode>();
  private rootId: string | null = null;
  private notFound: string | null = null;
  apiCalls = 0;

  constructor(private readonly api: ApiClient) {}

  async open(id: string): Promise<void> {
    this.nodes.clear();
    this.notFound = null;
    this.rootId = null;
    try {
      const tree = await this.fetchLevel(id);
      this.rootId = tree.object;
      this.admit(tree, true);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.notFound = id;
        return;
      }
      throw error;
    }
  }

  /** One expand = one spec call at depth 1. */
  async expand(id: string): Promise<void> {
    const entry = this.nodes.get(id);
    if (!entry || entry.expanded) return;
    const tree = await this.fetchLevel(id);
    this.admit(tree, true);
  }

  collapse(id: string): void {
    const entry = this.nodes.get(id);
    if (entry) entry.expanded = false;
  }

  private async fetchLevel(id: string): Promise<TreeNode> {
    this.apiCalls += 1;
    return this.api.specChildren(id);
  }

  private admit(tree: TreeNode, expanded: boolean): void {
    this.nodes.set(tree.object, {
      node: tree,
      expanded,
      children: tree.children.map((c) => c.object),
    });
    for (const child of tree.children) {
      if (!this.nodes.has(child.object)) {
        this.nodes.set(child.object, {
          node: child,
          expanded: false,
          children: [],
        });
      }
    }
  }

  render(): string {
    if (this.notFound !== null) return renderNotFound(this.notFound);
    if (this.rootId === null) return "";
    return this.renderNode(this.rootId);
  }

  private renderNode(id: string): string {
    const entry = this.nodes.get(id);
    if (!entry) return "";
    const childrenHtml = entry.expanded
      ? entry.children.map((c) => this.renderNode(c)).join("")
      : "";
    return renderBlock(entry.node, entry.expanded, childrenHtml);
  }
}
