/** Workbench bootstrap: wires the stages to the API client. */

import { ApiClient, ApiError } from "./api.js";
import { charRangeFromPoints, domSelectionToPoints } from "./selection.js";
import {
  addCustomSelection,
  advanceStage,
  clearSelections,
  goBack,
  initialState,
  setKnobs,
  setTab,
  toggleCandidate,
  toSpanSpecs,
  type Tab,
  type ViewState,
} from "./state.js";
import type { Candidate, FacetView, SessionView } from "./types.js";
import {
  renderFacets,
  renderFlaggedText,
  renderHeatmap,
  renderHistory,
  renderTokens,
} from "./view.js";

const api = new ApiClient("");
let state: ViewState = initialState();
let session: SessionView | null = null;
let candidateCache: Record<string, Candidate[]> = {};

const $ = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

function show(stage: ViewState["stage"]): void {
  for (const name of ["review", "answer_select", "results"]) {
    $(`stage-${name}`).classList.toggle("hidden", name !== stage);
  }
}

function setStatus(message: string): void {
  $("status").textContent = message;
}

async function refreshSession(): Promise<void> {
  if (!state.sessionId) return;
  session = await api.getSession(state.sessionId);
}

// ---- stage 1: review ------------------------------------------------------

async function startReview(): Promise<void> {
  const text = ($("paragraph-input") as HTMLTextAreaElement).value;
  try {
    const created = await api.createSession(text);
    state = { ...initialState(), sessionId: created.session_id };
    await refreshSession();
    renderReview();
    show("review");
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err));
  }
}

function renderReview(): void {
  if (!session) return;
  renderFlaggedText($("review-text"), session.text, session.flags,
                    (flag) => void removeFlag(flag.start, flag.end));
  const clean = session.flags.length === 0;
  ($("proceed-button") as HTMLButtonElement).disabled = !clean;
  setStatus(clean ? "paragraph is clean; proceed to answer selection"
                  : `${session.flags.length} flag(s) need attention`);
}

async function removeFlag(start: number, end: number): Promise<void> {
  if (!state.sessionId) return;
  await api.editText(state.sessionId, [{ start, end, replacement: "" }]);
  await refreshSession();
  state = clearSelections(state);
  renderReview();
}

// ---- stage 2: answer selection --------------------------------------------

async function openTab(tab: Tab): Promise<void> {
  state = setTab(state, tab);
  for (const name of ["named_entities", "noun_phrases", "custom_answers"]) {
    $(`tab-${name}`).classList.toggle("active", name === tab);
  }
  await renderSelectionStage();
}

async function loadCandidates(kind: "named_entity" | "noun_phrase"):
    Promise<Candidate[]> {
  if (!candidateCache[kind] && state.sessionId) {
    const resp = await api.candidates(state.sessionId, kind);
    candidateCache[kind] = resp.candidates;
  }
  return candidateCache[kind] ?? [];
}

async function renderSelectionStage(): Promise<void> {
  if (!session) return;
  const container = $("selection-text");
  const kind = state.activeTab === "named_entities" ? "named_entity"
    : state.activeTab === "noun_phrases" ? "noun_phrase" : null;
  try {
    const candidates = kind ? await loadCandidates(kind) : [];
    renderTokens(container, session.paragraph, session.text, candidates,
                 state.selections, {
                   onCandidateClick: (candidate) => {
                     state = toggleCandidate(state, candidate);
                     void renderSelectionStage();
                   },
                 });
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err));
    renderTokens(container, session.paragraph, session.text, [],
                 state.selections, {});
  }
  renderSelectionList();
}

function renderSelectionList(): void {
  const list = $("selected-spans");
  list.replaceChildren();
  state.selections.forEach((selection, index) => {
    const item = document.createElement("li");
    item.textContent = `${selection.surface} (${selection.source})`;
    item.style.backgroundColor = selection.color;
    item.addEventListener("click", () => {
      state = { ...state,
                selections: state.selections.filter((_, i) => i !== index) };
      void renderSelectionStage();
    });
    list.append(item);
  });
  ($("generate-button") as HTMLButtonElement).disabled =
    state.selections.length === 0;
}

function handleCustomSelection(): void {
  if (state.activeTab !== "custom_answers" || !session) return;
  const selection = window.getSelection();
  if (!selection || selection.isCollapsed) return;
  const points = domSelectionToPoints(selection);
  if (!points) return;
  const offsets = session.paragraph.offsets.map(([start, end]) => ({
    start,
    end,
  }));
  const range = charRangeFromPoints(points.anchor, points.focus, offsets);
  if (!range) return;
  state = addCustomSelection(state, {
    ...range,
    surface: session.text.slice(range.start, range.end),
  });
  selection.removeAllRanges();
  void renderSelectionStage();
}

// ---- stage 3: results ------------------------------------------------------

async function generate(): Promise<void> {
  if (!state.sessionId) return;
  setStatus("generating…");
  try {
    const resp = await api.generate(state.sessionId,
                                    toSpanSpecs(state.selections));
    await refreshSession();
    state = advanceStage(state);
    renderResults(resp.facets, resp.filtered_out);
    show("results");
    setStatus("");
  } catch (err) {
    setStatus(err instanceof ApiError ? err.message : String(err));
  }
}

function renderResults(facets: FacetView[], filteredOut: number): void {
  renderFacets($("facets"), facets, filteredOut, {
    onAttention: (qid) => void showAttention(qid),
    onEditQuestion: (qid, current) => void editQuestion(qid, current),
    onQuestionHistory: (qid) => void showQuestionHistory(qid),
    onEditAnswer: (aid, current) => void editAnswer(aid, current),
  });
  const sid = state.sessionId ?? "";
  ($("download-json") as HTMLAnchorElement).href = api.exportUrl(sid, "json");
  ($("download-text") as HTMLAnchorElement).href = api.exportUrl(sid, "text");
}

async function applyKnobs(): Promise<void> {
  const sid = state.sessionId;
  if (!sid) return;
  const intra = Number(($("intra-knob") as HTMLInputElement).value);
  const inter = Number(($("inter-knob") as HTMLInputElement).value);
  state = setKnobs(state, intra, inter);
  $("intra-knob-value").textContent = intra.toFixed(2);
  $("inter-knob-value").textContent = inter.toFixed(2);
  const resp = await api.setKnobs(sid, { intra, inter });
  await refreshSession();
  renderResults(resp.facets, session?.filtered_out ?? 0);
}

async function showAttention(questionId: string): Promise<void> {
  if (!state.sessionId) return;
  const attention = await api.attention(state.sessionId, questionId);
  renderHeatmap($("detail-panel"), attention);
}

async function editQuestion(questionId: string, current: string): Promise<void> {
  if (!state.sessionId) return;
  const text = window.prompt("edit question", current);
  if (!text || text === current) return;
  await api.editQuestion(state.sessionId, questionId, text);
  const resp = await api.setKnobs(state.sessionId, state.knobs);
  await refreshSession();
  renderResults(resp.facets, session?.filtered_out ?? 0);
}

async function showQuestionHistory(questionId: string): Promise<void> {
  if (!state.sessionId) return;
  const resp = await api.questionHistory(state.sessionId, questionId);
  renderHistory($("detail-panel"), "question versions", resp.history);
}

async function editAnswer(answerId: string, current: string): Promise<void> {
  if (!state.sessionId) return;
  const text = window.prompt("edit answer", current);
  if (!text || text === current) return;
  await api.editAnswer(state.sessionId, answerId, text);
  const resp = await api.setKnobs(state.sessionId, state.knobs);
  await refreshSession();
  renderResults(resp.facets, session?.filtered_out ?? 0);
}

// ---- wiring -----------------------------------------------------------------

function wire(): void {
  $("review-button").addEventListener("click", () => void startReview());
  $("proceed-button").addEventListener("click", () => {
    candidateCache = {};
    state = advanceStage(state);
    show("answer_select");
    void openTab("named_entities");
  });
  $("back-button").addEventListener("click", () => {
    state = goBack(state);
    show(state.stage);
    if (state.stage === "review") renderReview();
  });
  for (const tab of ["named_entities", "noun_phrases",
                     "custom_answers"] as Tab[]) {
    $(`tab-${tab}`).addEventListener("click", () => void openTab(tab));
  }
  $("selection-text").addEventListener("mouseup", handleCustomSelection);
  $("generate-button").addEventListener("click", () => void generate());
  $("results-back").addEventListener("click", () => {
    state = goBack(state);
    show(state.stage);
    void renderSelectionStage();
  });
  $("intra-knob").addEventListener("change", () => void applyKnobs());
  $("inter-knob").addEventListener("change", () => void applyKnobs());
}

document.addEventListener("DOMContentLoaded", wire);
