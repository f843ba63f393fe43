/** Thin DOM rendering layer; all data comes in as plain view models. */

import { buildHeatmap } from "./heatmap.js";
import type { SpanSelection } from "./state.js";
import type {
  AttentionView,
  Candidate,
  FacetView,
  HistoryEntry,
  ParagraphInfo,
  ReviewFlag,
} from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderFlaggedText(
  container: HTMLElement,
  text: string,
  flags: ReviewFlag[],
  onRemove: (flag: ReviewFlag) => void,
): void {
  container.replaceChildren();
  let cursor = 0;
  for (const flag of flags) {
    if (flag.start > cursor) {
      container.append(text.slice(cursor, flag.start));
    }
    const mark = el("mark", `flag flag-${flag.kind}`, flag.excerpt);
    mark.title = flag.message;
    const remove = el("button", "flag-remove", "×");
    remove.title = "remove this span";
    remove.addEventListener("click", () => onRemove(flag));
    mark.append(remove);
    container.append(mark);
    cursor = flag.end;
  }
  container.append(text.slice(cursor));
}

export interface TokenHandlers {
  onCandidateClick?: (candidate: Candidate) => void;
}

export function renderTokens(
  container: HTMLElement,
  paragraph: ParagraphInfo,
  text: string,
  candidates: Candidate[],
  selections: SpanSelection[],
  handlers: TokenHandlers = {},
): void {
  container.replaceChildren();
  const byStart = new Map(candidates.map((c) => [c.token_first, c]));
  let cursor = 0;
  let i = 0;
  while (i < paragraph.tokens.length) {
    const [start] = paragraph.offsets[i];
    if (start > cursor) container.append(text.slice(cursor, start));

    const candidate = byStart.get(i);
    const last = candidate ? candidate.token_last : i;
    const spanStart = paragraph.offsets[i][0];
    const spanEnd = paragraph.offsets[last][1];
    const wrapper = el("span", candidate ? "token candidate" : "token");
    for (let j = i; j <= last; j++) {
      const [s, e] = paragraph.offsets[j];
      if (s > spanStart && j > i) wrapper.append(text.slice(paragraph.offsets[j - 1][1], s));
      const tok = el("span", "tok", text.slice(s, e));
      tok.dataset.index = String(j);
      wrapper.append(tok);
    }
    const selection = selections.find(
      (s) => s.start <= spanStart && s.end >= spanEnd,
    );
    if (selection) wrapper.style.backgroundColor = selection.color;
    if (candidate && handlers.onCandidateClick) {
      wrapper.classList.add("clickable");
      wrapper.addEventListener("click", () =>
        handlers.onCandidateClick!(candidate),
      );
    }
    container.append(wrapper);
    cursor = spanEnd;
    i = last + 1;
  }
  container.append(text.slice(cursor));
}

export interface FacetHandlers {
  onAttention: (questionId: string) => void;
  onEditQuestion: (questionId: string, current: string) => void;
  onQuestionHistory: (questionId: string) => void;
  onEditAnswer: (answerId: string, current: string) => void;
}

export function renderFacets(
  container: HTMLElement,
  facets: FacetView[],
  filteredOut: number,
  handlers: FacetHandlers,
): void {
  container.replaceChildren();
  if (filteredOut > 0) {
    container.append(
      el("p", "filtered-note",
         `${filteredOut} question(s) removed as unanswerable`),
    );
  }
  if (!facets.length) {
    container.append(el("p", "empty", "no questions above the current knobs"));
    return;
  }
  for (const facet of facets) {
    const box = el("section", "facet");
    box.append(
      el("h3", "facet-stem",
         `${facet.stem}  (confidence ${facet.inter_confidence.toFixed(2)})`),
    );
    for (const member of facet.members) {
      const memberBox = el("div", "member");
      const answerRow = el("div", "answer-row");
      answerRow.append(
        el("span", "answer-text", member.answer.text),
        el("span", "score",
           `inter ${member.inter_confidence.toFixed(2)}`),
      );
      const editAnswer = el("button", "small", "edit answer");
      editAnswer.addEventListener("click", () =>
        handlers.onEditAnswer(member.answer.id, member.answer.text),
      );
      answerRow.append(editAnswer);
      memberBox.append(answerRow);

      const list = el("ul", "questions");
      for (const q of member.questions) {
        const item = el("li", "question");
        item.append(
          el("span", "question-text", q.text),
          el("span", "score", `intra ${q.intra_confidence.toFixed(2)}`),
        );
        const attn = el("button", "small", "attention weights");
        attn.addEventListener("click", () => handlers.onAttention(q.id));
        const edit = el("button", "small", "edit");
        edit.addEventListener("click", () =>
          handlers.onEditQuestion(q.id, q.text),
        );
        const history = el("button", "small", "history");
        history.addEventListener("click", () =>
          handlers.onQuestionHistory(q.id),
        );
        item.append(attn, edit, history);
        list.append(item);
      }
      memberBox.append(list);
      box.append(memberBox);
    }
    container.append(box);
  }
}

export function renderHeatmap(
  container: HTMLElement,
  attention: AttentionView,
): void {
  const model = buildHeatmap(
    attention.matrix,
    attention.row_labels,
    attention.col_labels,
  );
  container.replaceChildren();
  const grid = el("div", "heatmap");
  grid.style.gridTemplateColumns = `auto repeat(${model.nCols}, 1.6em)`;

  grid.append(el("span"));
  for (const label of model.colLabels) {
    const head = el("span", "heat-col-label", label);
    grid.append(head);
  }
  for (let r = 0; r < model.nRows; r++) {
    grid.append(el("span", "heat-row-label", model.rowLabels[r]));
    for (let c = 0; c < model.nCols; c++) {
      const cell = model.cells[r * model.nCols + c];
      const div = el("div", "heat-cell");
      div.style.backgroundColor = cell.color;
      div.title = `${model.rowLabels[r]} → ${model.colLabels[c]}: ` +
        cell.value.toFixed(4);
      grid.append(div);
    }
  }
  container.append(grid);
}

export function renderHistory(
  container: HTMLElement,
  title: string,
  entries: HistoryEntry[],
): void {
  container.replaceChildren();
  container.append(el("h4", undefined, title));
  const list = el("ol", "history");
  entries.forEach((entry, i) => {
    const item = el("li");
    const label = i === 0 ? "original" : `v${i}`;
    item.append(
      el("span", "history-version", label),
      el("span", "history-text", entry.text),
      el("span", "history-time", entry.timestamp),
    );
    list.append(item);
  });
  container.append(list);
}
