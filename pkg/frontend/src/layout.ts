/**
 * Pure canvas layout.
 *
 * Placement mirrors how a node came to exist: a refinement extends its
 * parent's row to the right, a branch starts a new row below its parent.
 * Roots stack down the first column. A node whose stored position is not
 * the origin has been dragged by the user and keeps that exact position;
 * the origin (0, 0) means "never placed" and gets an automatic slot.
 *
 * The function depends only on the project document, so the same input
 * always produces the same placement.
 */

import type { IdeaNode, Point, ProjectDoc } from "./types";

export const CARD_W = 240;
export const CARD_H = 150;
export const GAP_X = 60;
export const GAP_Y = 44;
export const STEP_X = CARD_W + GAP_X;
export const STEP_Y = CARD_H + GAP_Y;

interface Cell {
  cx: number;
  cy: number;
}

function cellKey(c: Cell): string {
  return `${c.cx},${c.cy}`;
}

function isPinned(node: IdeaNode): boolean {
  return node.position.x !== 0 || node.position.y !== 0;
}

export function computeLayout(project: ProjectDoc): Map<string, Point> {
  const ids = Object.keys(project.nodes);
  const childrenOf = new Map<string, string[]>();
  const roots: string[] = [];
  for (const id of ids) {
    const node = project.nodes[id];
    if (node.parent_id === null) {
      roots.push(id);
    } else {
      const siblings = childrenOf.get(node.parent_id) ?? [];
      siblings.push(id);
      childrenOf.set(node.parent_id, siblings);
    }
  }

  const occupied = new Set<string>();
  const cells = new Map<string, Cell>();
  const points = new Map<string, Point>();

  const claim = (id: string, node: IdeaNode, desired: Cell, axis: "x" | "y") => {
    if (isPinned(node)) {
      const cell = {
        cx: Math.round(node.position.x / STEP_X),
        cy: Math.round(node.position.y / STEP_Y),
      };
      occupied.add(cellKey(cell));
      cells.set(id, cell);
      points.set(id, { x: node.position.x, y: node.position.y });
      return;
    }
    const cell = { ...desired };
    while (occupied.has(cellKey(cell))) {
      if (axis === "x") cell.cx += 1;
      else cell.cy += 1;
    }
    occupied.add(cellKey(cell));
    cells.set(id, cell);
    points.set(id, { x: cell.cx * STEP_X, y: cell.cy * STEP_Y });
  };

  const placeChildren = (parentId: string) => {
    const parentCell = cells.get(parentId);
    if (!parentCell) return;
    const kids = childrenOf.get(parentId) ?? [];
    for (const kid of kids) {
      const node = project.nodes[kid];
      if (node.extension_kind === "refinement") {
        claim(kid, node, { cx: parentCell.cx + 1, cy: parentCell.cy }, "x");
      } else {
        claim(kid, node, { cx: parentCell.cx, cy: parentCell.cy + 1 }, "y");
      }
    }
    for (const kid of kids) {
      placeChildren(kid);
    }
  };

  for (const rootId of roots) {
    claim(rootId, project.nodes[rootId], { cx: 0, cy: 0 }, "y");
  }
  for (const rootId of roots) {
    placeChildren(rootId);
  }

  return points;
}

/** Bounding box of all placed cards, for fitting the viewport. */
export function contentBounds(
  layout: Map<string, Point>,
): { minX: number; minY: number; maxX: number; maxY: number } | null {
  if (layout.size === 0) return null;
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const p of layout.values()) {
    minX = Math.min(minX, p.x);
    minY = Math.min(minY, p.y);
    maxX = Math.max(maxX, p.x + CARD_W);
    maxY = Math.max(maxY, p.y + CARD_H);
  }
  return { minX, minY, maxX, maxY };
}
