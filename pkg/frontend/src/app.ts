/**
 * Single-page flow: library (pick tracks, upload) -> quiz -> stats.
 *
 * The client mirrors server state and never sees a correct answer before
 * grading; everything it shows comes from the documented HTTP endpoints.
 */

import { ApiClient, ApiError } from "./api.js";
import type { GradeResponse, Question } from "./api.js";
import type { AudioPlayer } from "./audio.js";
import { renderLibrary } from "./views/library.js";
import { renderQuiz } from "./views/quiz.js";
import { renderStats } from "./views/stats.js";

export interface AppOptions {
  pollIntervalMs?: number;
}

interface ClientSession {
  id: string;
  difficulty: string;
}

export class App {
  session: ClientSession | null = null;
  question: Question | null = null;
  grade: GradeResponse | null = null;
  chosenIndex: number | null = null;
  answered = 0;
  correct = 0;
  difficultyNotice: string | null = null;

  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private grading = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly player: AudioPlayer,
    private readonly options: AppOptions = {},
  ) {}

  async start(): Promise<void> {
    await this.showLibrary();
  }

  dispose(): void {
    this.stopPolling();
    this.player.stop();
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  private showError(message: string, retry: () => void): void {
    this.stopPolling();
    this.root.innerHTML = "";
    const banner = document.createElement("div");
    banner.dataset.testid = "error-banner";
    banner.className = "error-banner";
    const text = document.createElement("p");
    text.textContent = message;
    banner.appendChild(text);
    const button = document.createElement("button");
    button.dataset.testid = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", () => retry());
    banner.appendChild(button);
    this.root.appendChild(banner);
  }

  private describe(error: unknown): string {
    if (error instanceof ApiError) {
      return `${error.message} (${error.code})`;
    }
    return error instanceof Error ? error.message : String(error);
  }

  // -- library ------------------------------------------------------------

  async showLibrary(): Promise<void> {
    this.stopPolling();
    let tracks;
    try {
      tracks = await this.api.listTracks();
    } catch (error) {
      this.showError(this.describe(error), () => void this.showLibrary());
      return;
    }
    renderLibrary(this.root, tracks, {
      onUpload: (file, title) => void this.upload(file, title),
      onRefresh: () => void this.showLibrary(),
      onStart: (ids, difficulty) => void this.startSession(ids, difficulty),
    });
    const interval = this.options.pollIntervalMs ?? 2000;
    if (tracks.some((t) => t.status === "pending" || t.status === "running")) {
      this.pollTimer = setInterval(() => void this.showLibrary(), interval);
    }
  }

  private async upload(file: Blob, title: string): Promise<void> {
    try {
      await this.api.uploadTrack(file, title);
    } catch (error) {
      this.showError(this.describe(error), () => void this.showLibrary());
      return;
    }
    await this.showLibrary();
  }

  private async startSession(trackIds: string[], difficulty: string): Promise<void> {
    try {
      const created = await this.api.createSession(trackIds, difficulty);
      this.session = { id: created.session_id, difficulty: created.difficulty };
      this.answered = 0;
      this.correct = 0;
      this.difficultyNotice = null;
    } catch (error) {
      this.showError(this.describe(error), () => void this.showLibrary());
      return;
    }
    await this.nextQuestion();
  }

  // -- quiz ---------------------------------------------------------------

  private renderQuizView(): void {
    if (!this.question) {
      return;
    }
    renderQuiz(
      this.root,
      {
        question: this.question,
        grade: this.grade,
        chosenIndex: this.chosenIndex,
        answered: this.answered,
        correct: this.correct,
        difficultyNotice: this.difficultyNotice,
      },
      {
        onPlaySnippet: () => void this.playSnippet(),
        onPreviewOption: (index) => void this.previewOption(index),
        onChoose: (index) => void this.choose(index),
        onNext: () => void this.nextQuestion(),
        onShowStats: () => void this.showStats(),
      },
    );
  }

  async nextQuestion(): Promise<void> {
    if (!this.session) {
      return;
    }
    this.stopPolling();
    try {
      this.question = await this.api.nextQuestion(this.session.id);
    } catch (error) {
      this.showError(this.describe(error), () => void this.nextQuestion());
      return;
    }
    this.grade = null;
    this.chosenIndex = null;
    this.renderQuizView();
  }

  private async playSnippet(): Promise<void> {
    if (this.question) {
      await this.player.play(this.api.url(this.question.snippet_url));
    }
  }

  private async previewOption(index: number): Promise<void> {
    const url = this.question?.option_preview_urls[index];
    if (url) {
      await this.player.play(this.api.url(url));
    }
  }

  private async choose(index: number): Promise<void> {
    if (!this.session || !this.question || this.grade || this.grading) {
      return;
    }
    this.grading = true;
    try {
      const result = await this.api.answer(this.session.id, this.question.id, index);
      this.grade = result;
      this.chosenIndex = index;
      this.answered += 1;
      if (result.correct) {
        this.correct += 1;
      }
      if (result.difficulty !== this.session.difficulty) {
        const direction =
          result.difficulty > this.session.difficulty ? "up" : "down";
        this.difficultyNotice = `Difficulty moved ${direction} to ${result.difficulty}`;
        this.session.difficulty = result.difficulty;
      } else {
        this.difficultyNotice = null;
      }
    } catch (error) {
      this.showError(this.describe(error), () => this.renderQuizView());
      return;
    } finally {
      this.grading = false;
    }
    this.renderQuizView();
  }

  // -- stats ----------------------------------------------------------------

  async showStats(): Promise<void> {
    if (!this.session) {
      return;
    }
    try {
      const stats = await this.api.stats(this.session.id);
      renderStats(this.root, stats, {
        onBack: () => this.renderQuizView(),
      });
    } catch (error) {
      this.showError(this.describe(error), () => void this.showStats());
    }
  }
}
