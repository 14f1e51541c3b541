import type { TrackSummary } from "../api.js";

export interface LibraryHandlers {
  onUpload(file: Blob, title: string): void;
  onRefresh(): void;
  onStart(trackIds: string[], difficulty: string): void;
}

const STATUS_BADGES: Record<string, string> = {
  pending: "analyzing",
  running: "analyzing",
  ready: "ready",
  failed: "failed",
};

export function renderLibrary(
  container: HTMLElement,
  tracks: TrackSummary[],
  handlers: LibraryHandlers,
): void {
  container.innerHTML = "";
  const view = document.createElement("section");
  view.dataset.testid = "library-view";
  view.className = "library";

  const heading = document.createElement("h2");
  heading.textContent = "Track library";
  view.appendChild(heading);

  if (tracks.length === 0) {
    const empty = document.createElement("p");
    empty.dataset.testid = "empty-state";
    empty.className = "empty-state";
    empty.textContent = "No tracks yet. Upload a WAV file to build your first quiz.";
    view.appendChild(empty);
  } else {
    const list = document.createElement("ul");
    list.className = "track-list";
    for (const track of tracks) {
      const row = document.createElement("li");
      row.dataset.testid = "track-row";
      row.dataset.trackId = track.id;

      const checkbox = document.createElement("input");
      checkbox.type = "checkbox";
      checkbox.dataset.testid = "track-select";
      checkbox.value = track.id;
      checkbox.disabled = track.status !== "ready";
      row.appendChild(checkbox);

      const title = document.createElement("span");
      title.className = "track-title";
      title.textContent = track.title;
      row.appendChild(title);

      const badge = document.createElement("span");
      badge.dataset.testid = "track-status";
      badge.className = `badge badge-${track.status}`;
      badge.textContent = STATUS_BADGES[track.status] ?? track.status;
      if (track.error) {
        badge.title = track.error;
      }
      row.appendChild(badge);
      list.appendChild(row);
    }
    view.appendChild(list);
  }

  const controls = document.createElement("div");
  controls.className = "session-controls";

  const difficulty = document.createElement("select");
  difficulty.dataset.testid = "difficulty-select";
  for (const level of ["L1", "L2", "L3"]) {
    const option = document.createElement("option");
    option.value = level;
    option.textContent = level;
    difficulty.appendChild(option);
  }
  controls.appendChild(difficulty);

  const start = document.createElement("button");
  start.dataset.testid = "start-session";
  start.textContent = "Start quiz";
  start.addEventListener("click", () => {
    const chosen = Array.from(
      view.querySelectorAll<HTMLInputElement>('[data-testid="track-select"]:checked'),
    ).map((box) => box.value);
    if (chosen.length > 0) {
      handlers.onStart(chosen, difficulty.value);
    }
  });
  controls.appendChild(start);

  const refresh = document.createElement("button");
  refresh.dataset.testid = "refresh-tracks";
  refresh.textContent = "Refresh";
  refresh.addEventListener("click", () => handlers.onRefresh());
  controls.appendChild(refresh);
  view.appendChild(controls);

  const uploadBox = document.createElement("form");
  uploadBox.className = "upload-box";
  const fileInput = document.createElement("input");
  fileInput.type = "file";
  fileInput.accept = ".wav,audio/wav";
  fileInput.dataset.testid = "upload-file";
  uploadBox.appendChild(fileInput);

  const titleInput = document.createElement("input");
  titleInput.type = "text";
  titleInput.placeholder = "Track title";
  titleInput.dataset.testid = "upload-title";
  uploadBox.appendChild(titleInput);

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.dataset.testid = "upload-submit";
  submit.textContent = "Upload";
  uploadBox.appendChild(submit);

  uploadBox.addEventListener("submit", (event) => {
    event.preventDefault();
    const file = fileInput.files?.[0];
    if (file) {
      handlers.onUpload(file, titleInput.value || "Untitled track");
    }
  });
  view.appendChild(uploadBox);

  container.appendChild(view);
}
