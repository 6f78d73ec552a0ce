/** Shared fixture builders and DOM event helpers. */

import { ApiClient } from "../src/api";
import { App } from "../src/app";
import { StubServer } from "./stub-api";

/**
 * A small tree exercising both extension kinds:
 *   n1 (root) -> n2 (refinement), n3 (branch); n2 -> n4 (refinement).
 */
export function buildFixtureServer(): StubServer {
  const server = new StubServer({
    id: "p1",
    title: "Campus e-bike sharing",
    topic: "e-bike sharing",
    nodes: {},
    created_at: "2026-08-19T00:00:00+00:00",
    schema_version: 1,
  });
  const root = server.addNode("root", null);
  root.sections.user_pain_points.content = "Students miss buses between campuses.";
  root.sections.user_pain_points.status = "done";
  root.sections.market_analysis.content = "Two campuses, 30k students.";
  root.sections.market_analysis.status = "in_progress";
  const refined = server.addNode("refinement", root.id);
  const branched = server.addNode("branch", root.id);
  branched.meta_reflection = "Shifted from commuting to campus tourism.";
  server.addNode("refinement", refined.id);
  return server;
}

export async function mountFixtureApp(
  server: StubServer,
): Promise<{ app: App; root: HTMLElement }> {
  const api = new ApiClient("http://stub.local", server.fetch);
  const app = new App(api);
  const root = document.createElement("div");
  document.body.appendChild(root);
  root.appendChild(app.element);
  await app.open(server.project.id);
  return { app, root };
}

export function cardFor(root: HTMLElement, nodeId: string): HTMLElement {
  const card = root.querySelector<HTMLElement>(`[data-node-id="${nodeId}"]`);
  if (!card) throw new Error(`no card rendered for ${nodeId}`);
  return card;
}

export function cardPosition(card: HTMLElement): { x: number; y: number } {
  return { x: parseFloat(card.style.left), y: parseFloat(card.style.top) };
}

export function doubleClick(target: HTMLElement): void {
  target.dispatchEvent(new MouseEvent("dblclick", { bubbles: true }));
}

export function click(target: HTMLElement): void {
  target.dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function mouseDown(target: HTMLElement, x: number, y: number): void {
  target.dispatchEvent(
    new MouseEvent("mousedown", { bubbles: true, button: 0, clientX: x, clientY: y }),
  );
}

export function mouseMove(target: HTMLElement, x: number, y: number): void {
  target.dispatchEvent(
    new MouseEvent("mousemove", { bubbles: true, clientX: x, clientY: y }),
  );
}

export function mouseUp(target: HTMLElement, x: number, y: number): void {
  target.dispatchEvent(
    new MouseEvent("mouseup", { bubbles: true, clientX: x, clientY: y }),
  );
}

export function setTextarea(area: HTMLTextAreaElement, text: string): void {
  area.value = text;
}

/** Let queued promise callbacks (fetch round-trips) settle. */
export async function flush(times = 6): Promise<void> {
  for (let i = 0; i < times; i += 1) {
    await Promise.resolve();
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
