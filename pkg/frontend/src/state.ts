/** View state and its pure transitions.
 *
 * The stage only moves forward through review -> answer_select -> results
 * unless the user explicitly navigates back. Selections carry stable
 * highlight colors; toggling a candidate off restores the previous state
 * exactly.
 */

export type Stage = "review" | "answer_select" | "results";
export type Tab = "named_entities" | "noun_phrases" | "custom_answers";

export interface SpanSelection {
  start: number;
  end: number;
  surface: string;
  source: string;
  color: string;
  candidateId?: string;
}

export interface ViewState {
  sessionId: string | null;
  stage: Stage;
  activeTab: Tab;
  knobs: { intra: number; inter: number };
  selections: SpanSelection[];
}

export const HIGHLIGHT_PALETTE = [
  "#ffd54f",
  "#81d4fa",
  "#a5d6a7",
  "#f8bbd0",
  "#b39ddb",
  "#ffab91",
  "#80cbc4",
  "#e6ee9c",
];

const STAGE_ORDER: Stage[] = ["review", "answer_select", "results"];

export function initialState(): ViewState {
  return {
    sessionId: null,
    stage: "review",
    activeTab: "named_entities",
    knobs: { intra: 0, inter: 0 },
    selections: [],
  };
}

export function nextColor(selections: SpanSelection[]): string {
  const used = new Set(selections.map((s) => s.color));
  for (const color of HIGHLIGHT_PALETTE) {
    if (!used.has(color)) return color;
  }
  return HIGHLIGHT_PALETTE[selections.length % HIGHLIGHT_PALETTE.length];
}

export function advanceStage(state: ViewState): ViewState {
  const idx = STAGE_ORDER.indexOf(state.stage);
  if (idx >= STAGE_ORDER.length - 1) return state;
  return { ...state, stage: STAGE_ORDER[idx + 1] };
}

export function goBack(state: ViewState): ViewState {
  const idx = STAGE_ORDER.indexOf(state.stage);
  if (idx === 0) return state;
  return { ...state, stage: STAGE_ORDER[idx - 1] };
}

export function setTab(state: ViewState, tab: Tab): ViewState {
  return { ...state, activeTab: tab };
}

export function setKnobs(
  state: ViewState,
  intra: number,
  inter: number,
): ViewState {
  if (intra < 0 || intra > 1 || inter < 0 || inter > 1) {
    throw new RangeError("knob values must be in [0, 1]");
  }
  return { ...state, knobs: { intra, inter } };
}

/** Click on a pre-highlighted candidate: select it, or deselect if chosen. */
export function toggleCandidate(
  state: ViewState,
  candidate: { id: string; start: number; end: number; surface: string; source: string },
): ViewState {
  const existing = state.selections.findIndex(
    (s) => s.candidateId === candidate.id,
  );
  if (existing >= 0) {
    const selections = state.selections.slice();
    selections.splice(existing, 1);
    return { ...state, selections };
  }
  const selection: SpanSelection = {
    start: candidate.start,
    end: candidate.end,
    surface: candidate.surface,
    source: candidate.source,
    color: nextColor(state.selections),
    candidateId: candidate.id,
  };
  return { ...state, selections: [...state.selections, selection] };
}

/** Manual highlight from the custom tab; overlapping spans are allowed. */
export function addCustomSelection(
  state: ViewState,
  span: { start: number; end: number; surface: string },
): ViewState {
  const selection: SpanSelection = {
    ...span,
    source: "custom",
    color: nextColor(state.selections),
  };
  return { ...state, selections: [...state.selections, selection] };
}

export function removeSelection(state: ViewState, index: number): ViewState {
  const selections = state.selections.slice();
  selections.splice(index, 1);
  return { ...state, selections };
}

export function clearSelections(state: ViewState): ViewState {
  return { ...state, selections: [] };
}

/** Span specs the generate endpoint expects, ids preferred when known. */
export function toSpanSpecs(
  selections: SpanSelection[],
): ({ id: string } | { start: number; end: number })[] {
  return selections.map((s) =>
    s.candidateId ? { id: s.candidateId } : { start: s.start, end: s.end },
  );
}
