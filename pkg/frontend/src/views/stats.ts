import type { SessionStats } from "../api.js";

export interface StatsHandlers {
  onBack(): void;
}

const PLACEHOLDER = "—";

function percent(value: number | null): string {
  return value === null ? PLACEHOLDER : `${Math.round(value * 100)}%`;
}

export function renderStats(
  container: HTMLElement,
  stats: SessionStats,
  handlers: StatsHandlers,
): void {
  container.innerHTML = "";
  const view = document.createElement("section");
  view.dataset.testid = "stats-view";
  view.className = "stats";

  const heading = document.createElement("h2");
  heading.textContent = "Session stats";
  view.appendChild(heading);

  const summary = document.createElement("dl");
  const rows: Array<[string, string, string]> = [
    ["Answered", String(stats.answered), "stat-answered"],
    ["Accuracy", percent(stats.accuracy), "stat-accuracy"],
    ["Difficulty", stats.difficulty, "stat-difficulty"],
  ];
  for (const [label, value, testid] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.dataset.testid = testid;
    dd.textContent = value;
    summary.appendChild(dt);
    summary.appendChild(dd);
  }
  view.appendChild(summary);

  const qualities = Object.keys(stats.per_quality).sort();
  const bars = document.createElement("div");
  bars.className = "quality-bars";
  if (qualities.length === 0) {
    const none = document.createElement("p");
    none.dataset.testid = "no-quality-data";
    none.textContent = PLACEHOLDER;
    bars.appendChild(none);
  }
  for (const quality of qualities) {
    const entry = stats.per_quality[quality];
    if (!entry) {
      continue;
    }
    const row = document.createElement("div");
    row.dataset.testid = `quality-row-${quality}`;
    row.className = "quality-row";

    const name = document.createElement("span");
    name.className = "quality-name";
    name.textContent = quality;
    row.appendChild(name);

    const bar = document.createElement("div");
    bar.className = "bar-track";
    const fill = document.createElement("div");
    fill.className = "bar-fill";
    const ratio = entry.accuracy ?? 0;
    fill.style.width = `${Math.round(ratio * 100)}%`;
    bar.appendChild(fill);
    row.appendChild(bar);

    const counts = document.createElement("span");
    counts.dataset.testid = `quality-counts-${quality}`;
    counts.textContent = `${entry.correct}/${entry.answered}`;
    row.appendChild(counts);

    bars.appendChild(row);
  }
  view.appendChild(bars);

  const back = document.createElement("button");
  back.dataset.testid = "back-to-quiz";
  back.textContent = "Back to quiz";
  back.addEventListener("click", () => handlers.onBack());
  view.appendChild(back);

  container.appendChild(view);
}
