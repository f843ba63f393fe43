/** Payload shapes of the /v1 REST API. */

export interface ReviewFlag {
  kind: "non_ascii" | "url";
  start: number;
  end: number;
  excerpt: string;
  message: string;
}

export interface ParagraphInfo {
  tokens: string[];
  offsets: [number, number][];
}

export interface Candidate {
  id: string;
  start: number;
  end: number;
  token_first: number;
  token_last: number;
  surface: string;
  source: string;
}

export interface QuestionView {
  id: string;
  text: string;
  tokens: string[];
  intra_confidence: number;
  beam_score: number;
  truncated: boolean;
}

export interface AnswerView {
  id: string;
  text: string;
  start: number;
  end: number;
  source: string;
}

export interface MemberView {
  answer: AnswerView;
  inter_confidence: number;
  questions: QuestionView[];
}

export interface FacetView {
  stem: string;
  inter_confidence: number;
  members: MemberView[];
}

export interface Knobs {
  intra: number;
  inter: number;
}

export interface SessionView {
  session_id: string;
  text: string;
  flags: ReviewFlag[];
  paragraph: ParagraphInfo;
  knobs: Knobs;
  selected_spans: (Candidate & { source: string })[];
  facets: FacetView[];
  filtered_out: number;
  created: string;
  updated: string;
}

export interface AttentionView {
  matrix: number[][];
  row_labels: string[];
  col_labels: string[];
}

export interface HistoryEntry {
  text: string;
  timestamp: string;
}

export interface EditSpec {
  start: number;
  end: number;
  replacement: string;
}

export type SpanSpec = { id: string } | { start: number; end: number };
