import { afterEach, describe, expect, it } from "vitest";

import {
  buildFixtureServer,
  cardFor,
  cardPosition,
  doubleClick,
  flush,
  mountFixtureApp,
  mouseDown,
  mouseMove,
  mouseUp,
} from "./fixtures";
import { StubServer } from "./stub-api";

afterEach(() => {
  document.body.innerHTML = "";
});

describe("canvas cards", () => {
  it("renders one card per node with progress and kind", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    expect(root.querySelectorAll(".idea-card")).toHaveLength(4);
    const rootCard = cardFor(root, "n1");
    expect(rootCard.querySelector(".card-title")?.textContent).toBeTruthy();
    expect(rootCard.querySelector(".card-progress")?.textContent).toContain("1/7");
    expect(rootCard.classList.contains("kind-root")).toBe(true);
  });

  it("places refinement children level with their parent and branch children below", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    const parent = cardPosition(cardFor(root, "n1"));
    const refined = cardPosition(cardFor(root, "n2"));
    const branched = cardPosition(cardFor(root, "n3"));
    expect(refined.y).toBe(parent.y);
    expect(refined.x).toBeGreaterThan(parent.x);
    expect(branched.x).toBe(parent.x);
    expect(branched.y).toBeGreaterThan(parent.y);
  });

  it("shows the meta-reflection segment only on cards that have one", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    expect(cardFor(root, "n3").querySelector(".card-meta-text")?.textContent).toBe(
      "Shifted from commuting to campus tourism.",
    );
    expect(cardFor(root, "n1").querySelector(".card-meta")).toBeNull();
  });

  it("offers a create-idea affordance on an empty project", async () => {
    const server = new StubServer();
    const { root } = await mountFixtureApp(server);
    const button = root.querySelector<HTMLElement>(".create-idea");
    expect(button).not.toBeNull();
    button!.click();
    await flush();
    expect(root.querySelectorAll(".idea-card")).toHaveLength(1);
    expect(Object.keys(server.project.nodes)).toHaveLength(1);
  });

  it("opens the workspace on double-click with all seven sections listed in order", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    expect(root.querySelector(".section-list")).toBeNull();
    doubleClick(cardFor(root, "n1"));
    const rows = [...root.querySelectorAll<HTMLElement>(".section-row")];
    expect(rows).toHaveLength(7);
    expect(rows.map((r) => r.querySelector(".section-title")?.textContent)).toEqual([
      "User Pain Points",
      "Market Analysis",
      "Product Overview",
      "Competitive Analysis",
      "Feasibility Analysis",
      "Funding Plan",
      "Team",
    ]);
    expect(rows[0].querySelector(".badge")?.textContent).toBe("Done");
    expect(rows[1].querySelector(".badge")?.textContent).toBe("In progress");
    expect(rows[2].querySelector(".badge")?.textContent).toBe("Empty");
  });

  it("marks the clicked card as selected", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    const card = cardFor(root, "n2");
    mouseDown(card, 10, 10);
    mouseUp(card, 10, 10);
    expect(cardFor(root, "n2").classList.contains("selected")).toBe(true);
    expect(cardFor(root, "n1").classList.contains("selected")).toBe(false);
  });

  it("applies drags immediately and reports the drop position to the server", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    const pane = root.querySelector<HTMLElement>(".canvas-pane")!;
    const card = cardFor(root, "n2");
    const before = cardPosition(card);

    mouseDown(card, 100, 100);
    mouseMove(pane, 180, 150);
    const during = cardPosition(cardFor(root, "n2"));
    expect(during.x).toBe(before.x + 80);
    expect(during.y).toBe(before.y + 50);
    const movesBeforeDrop = server.requests.filter((r) => r.method === "PATCH");
    expect(movesBeforeDrop).toHaveLength(0);

    mouseUp(pane, 180, 150);
    await flush();
    const move = server.requests.find(
      (r) => r.method === "PATCH" && r.path === "/projects/p1/nodes/n2",
    );
    expect(move).toBeDefined();
    expect(move!.body).toEqual({
      position: { x: before.x + 80, y: before.y + 50 },
    });
    expect(server.project.nodes.n2.position).toEqual({
      x: before.x + 80,
      y: before.y + 50,
    });
    const after = cardPosition(cardFor(root, "n2"));
    expect(after).toEqual({ x: before.x + 80, y: before.y + 50 });
  });

  it("treats a sub-threshold wiggle as a click, not a move", async () => {
    const server = buildFixtureServer();
    const { root } = await mountFixtureApp(server);
    const pane = root.querySelector<HTMLElement>(".canvas-pane")!;
    const card = cardFor(root, "n3");
    mouseDown(card, 50, 50);
    mouseMove(pane, 52, 51);
    mouseUp(pane, 52, 51);
    await flush();
    expect(server.requests.some((r) => r.method === "PATCH")).toBe(false);
    expect(cardFor(root, "n3").classList.contains("selected")).toBe(true);
  });
});
