import type { GradeResponse, Question } from "../api.js";

export interface QuizHandlers {
  onPlaySnippet(): void;
  onPreviewOption(index: number): void;
  onChoose(index: number): void;
  onNext(): void;
  onShowStats(): void;
}

export interface QuizViewState {
  question: Question;
  grade: GradeResponse | null;
  chosenIndex: number | null;
  answered: number;
  correct: number;
  difficultyNotice: string | null;
}

export function renderQuiz(
  container: HTMLElement,
  state: QuizViewState,
  handlers: QuizHandlers,
): void {
  container.innerHTML = "";
  const view = document.createElement("section");
  view.dataset.testid = "quiz-view";
  view.className = "quiz";

  const header = document.createElement("div");
  header.className = "quiz-header";
  const accuracy = document.createElement("span");
  accuracy.dataset.testid = "accuracy-live";
  accuracy.textContent =
    state.answered === 0
      ? "No answers yet"
      : `${state.correct}/${state.answered} correct`;
  header.appendChild(accuracy);

  const difficulty = document.createElement("span");
  difficulty.dataset.testid = "difficulty-label";
  difficulty.className = "badge";
  difficulty.textContent = state.question.difficulty;
  header.appendChild(difficulty);

  const statsLink = document.createElement("button");
  statsLink.dataset.testid = "show-stats";
  statsLink.textContent = "Stats";
  statsLink.addEventListener("click", () => handlers.onShowStats());
  header.appendChild(statsLink);
  view.appendChild(header);

  if (state.difficultyNotice) {
    const notice = document.createElement("p");
    notice.dataset.testid = "difficulty-notice";
    notice.className = "notice";
    notice.textContent = state.difficultyNotice;
    view.appendChild(notice);
  }

  const playRow = document.createElement("div");
  playRow.className = "play-row";
  const play = document.createElement("button");
  play.dataset.testid = "play-snippet";
  play.textContent = "Play snippet";
  play.addEventListener("click", () => handlers.onPlaySnippet());
  playRow.appendChild(play);
  view.appendChild(playRow);

  const prompt = document.createElement("p");
  prompt.textContent = "Which chord is playing?";
  view.appendChild(prompt);

  const grid = document.createElement("div");
  grid.className = "option-grid";
  state.question.options.forEach((label, index) => {
    const cell = document.createElement("div");
    cell.className = "option-cell";

    const choose = document.createElement("button");
    choose.dataset.testid = `option-${index}`;
    choose.className = "option-button";
    choose.textContent = label;
    choose.disabled = state.grade !== null;
    if (state.grade !== null) {
      if (index === state.grade.correct_index) {
        choose.classList.add("option-correct");
      } else if (index === state.chosenIndex) {
        choose.classList.add("option-wrong");
      }
    }
    choose.addEventListener("click", () => handlers.onChoose(index));
    cell.appendChild(choose);

    const preview = document.createElement("button");
    preview.dataset.testid = `preview-${index}`;
    preview.className = "preview-button";
    preview.title = `Play ${label} on piano`;
    preview.textContent = "\u{1F50A}";
    preview.addEventListener("click", () => handlers.onPreviewOption(index));
    cell.appendChild(preview);

    grid.appendChild(cell);
  });
  view.appendChild(grid);

  if (state.grade !== null) {
    const feedback = document.createElement("p");
    feedback.dataset.testid = "feedback";
    feedback.className = state.grade.correct ? "feedback-good" : "feedback-bad";
    feedback.textContent = state.grade.correct
      ? `Correct! It was ${state.grade.true_label}.`
      : `Not quite. It was ${state.grade.true_label}.`;
    view.appendChild(feedback);

    const next = document.createElement("button");
    next.dataset.testid = "next-question";
    next.textContent = "Next question";
    next.addEventListener("click", () => handlers.onNext());
    view.appendChild(next);
  }

  container.appendChild(view);
}
