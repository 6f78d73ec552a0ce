/**
 * Wire types for the meflex HTTP API.
 *
 * These mirror the server's JSON documents field for field. The client
 * treats them as read-only snapshots: every mutation round-trips through
 * the API and the re-fetched server state replaces whatever was cached.
 */

export type SectionTag =
  | "user_pain_points"
  | "market_analysis"
  | "product_overview"
  | "competitive_analysis"
  | "feasibility_analysis"
  | "funding_plan"
  | "team";

export interface SectionInfo {
  tag: SectionTag;
  title: string;
}

// Canonical section order; the workspace list and exports follow it.
export const SECTIONS: readonly SectionInfo[] = [
  { tag: "user_pain_points", title: "User Pain Points" },
  { tag: "market_analysis", title: "Market Analysis" },
  { tag: "product_overview", title: "Product Overview" },
  { tag: "competitive_analysis", title: "Competitive Analysis" },
  { tag: "feasibility_analysis", title: "Feasibility Analysis" },
  { tag: "funding_plan", title: "Funding Plan" },
  { tag: "team", title: "Team" },
] as const;

export function sectionTitle(tag: SectionTag): string {
  const info = SECTIONS.find((s) => s.tag === tag);
  return info ? info.title : tag;
}

export type SectionStatus = "empty" | "in_progress" | "done";

export type ExtensionKind = "root" | "refinement" | "branch";

export type MessageRole = "user" | "assistant" | "reflection_question";

export interface Point {
  x: number;
  y: number;
}

export interface SectionDraft {
  content: string;
  status: SectionStatus;
  last_modified: string;
}

export interface ChatMessage {
  role: MessageRole;
  content: string;
  timestamp: string;
}

export interface IdeaNode {
  id: string;
  extension_kind: ExtensionKind;
  parent_id: string | null;
  position: Point;
  sections: Record<SectionTag, SectionDraft>;
  // Only threads with at least one message are serialized.
  chat_threads?: Partial<Record<SectionTag, ChatMessage[]>>;
  meta_reflection: string | null;
  meta_thread: ChatMessage[];
  created_at: string;
}

export interface ProjectDoc {
  id: string;
  title: string;
  topic: string;
  nodes: Record<string, IdeaNode>;
  created_at: string;
  schema_version: number;
}

export interface ProjectSummary {
  id: string;
  title: string;
  topic: string;
  node_count: number;
  created_at: string;
}

export interface SectionChange {
  section: SectionTag;
  kind: "added" | "removed" | "modified";
  before: string;
  after: string;
}

export interface ChangeSet {
  from_node: string;
  to_node: string;
  changes: SectionChange[];
}

export interface TodoSummary {
  node_id: string;
  statuses: Record<SectionTag, SectionStatus>;
  done_count: number;
  total: number;
}

export interface ChatRound {
  node_id: string;
  section: SectionTag;
  assistant: ChatMessage;
  reflection: ChatMessage;
}

export interface MetaReflectionResult {
  node_id: string;
  meta_reflection: string;
}

export interface MetaChatResult extends MetaReflectionResult {
  meta_thread: ChatMessage[];
}

export function threadFor(node: IdeaNode, section: SectionTag): ChatMessage[] {
  return node.chat_threads?.[section] ?? [];
}

export function doneCount(node: IdeaNode): number {
  return SECTIONS.filter((s) => node.sections[s.tag]?.status === "done").length;
}
