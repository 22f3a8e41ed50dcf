import { ApiClient, ApiError, formatBound } from "./api";
import { renderAttributeChart } from "./charts";
import { Debouncer, RequestSequence } from "./debounce";
import { renderExplanation } from "./explanation";
import { renderPlaylist } from "./playlist";
import {
  FULL_RANGES,
  SOURCES,
  activeRanges,
  clampPair,
  initialState,
  type Source,
  type UiState,
} from "./state";
import {
  ATTRIBUTE_NAMES,
  type AttributeName,
  type PlaylistEntry,
  type Range,
} from "./types";

export interface AppOptions {
  baseUrl: string;
  k?: number;
  debounceMs?: number;
}

const SLIDER_STEP: Record<AttributeName, number> = {
  danceability: 0.05,
  energy: 0.05,
  instrumentalness: 0.05,
  liveness: 0.05,
  duration_minutes: 0.5,
};

/**
 * The dashboard controller. Owns UiState, talks to the service, and keeps
 * the panels in sync. Slider movement is debounced; every request carries
 * a sequence number and only the latest one may update the screen, so a
 * slow response can never clobber a newer playlist.
 */
export class DashboardApp {
  readonly state: UiState;
  readonly api: ApiClient;

  private readonly sequence = new RequestSequence();
  private readonly debouncer: Debouncer;
  private inflight: AbortController | null = null;

  private userInput!: HTMLInputElement;
  private sourceSelect!: HTMLSelectElement;
  private banner!: HTMLElement;
  private playlistPanel!: HTMLElement;
  private chartPanel!: HTMLElement;
  private explanationPanel!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    options: AppOptions,
  ) {
    this.state = initialState();
    if (options.k) this.state.k = options.k;
    this.api = new ApiClient(options.baseUrl);
    this.debouncer = new Debouncer(options.debounceMs ?? 300);
  }

  mount(): this {
    this.root.textContent = "";
    this.root.appendChild(this.buildControls());

    this.banner = document.createElement("div");
    this.banner.id = "error-banner";
    this.banner.hidden = true;
    this.root.appendChild(this.banner);

    const panels = document.createElement("div");
    panels.className = "panels";

    this.playlistPanel = document.createElement("section");
    this.playlistPanel.id = "playlist-panel";
    this.chartPanel = document.createElement("section");
    this.chartPanel.id = "chart-panel";
    this.explanationPanel = document.createElement("section");
    this.explanationPanel.id = "explanation-panel";

    panels.append(this.playlistPanel, this.chartPanel, this.explanationPanel);
    this.root.appendChild(panels);

    this.renderPanels();
    return this;
  }

  private buildControls(): HTMLElement {
    const controls = document.createElement("div");
    controls.className = "controls";

    this.userInput = document.createElement("input");
    this.userInput.id = "user-input";
    this.userInput.placeholder = "listener id";
    this.userInput.addEventListener("change", () => {
      void this.setUserId(this.userInput.value);
    });

    const load = document.createElement("button");
    load.id = "load-button";
    load.type = "button";
    load.textContent = "Load";
    load.addEventListener("click", () => {
      void this.setUserId(this.userInput.value);
    });

    this.sourceSelect = document.createElement("select");
    this.sourceSelect.id = "source-select";
    for (const source of SOURCES) {
      const option = document.createElement("option");
      option.value = source;
      option.textContent = source;
      this.sourceSelect.appendChild(option);
    }
    this.sourceSelect.addEventListener("change", () => {
      void this.setSource(this.sourceSelect.value as Source);
    });

    const sliders = document.createElement("div");
    sliders.className = "sliders";
    for (const name of ATTRIBUTE_NAMES) {
      sliders.appendChild(this.buildSlider(name));
    }

    controls.append(this.userInput, load, this.sourceSelect, sliders);
    return controls;
  }

  /** Two overlapping range inputs acting as one dual-handle slider. */
  private buildSlider(name: AttributeName): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "dual-slider";
    wrap.dataset.attribute = name;

    const label = document.createElement("label");
    label.textContent = name.replace(/_/g, " ");

    const [min, max] = FULL_RANGES[name];
    const lo = document.createElement("input");
    const hi = document.createElement("input");
    for (const [input, cls, value] of [
      [lo, "lo", min],
      [hi, "hi", max],
    ] as const) {
      input.type = "range";
      input.className = cls;
      input.min = String(min);
      input.max = String(max);
      input.step = String(SLIDER_STEP[name]);
      input.value = String(value);
    }

    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = `${formatBound(min)},${formatBound(max)}`;

    const apply = (moved: "lo" | "hi") => {
      const pair = clampPair(Number(lo.value), Number(hi.value), moved);
      lo.value = String(pair[0]);
      hi.value = String(pair[1]);
      readout.textContent = `${formatBound(pair[0])},${formatBound(pair[1])}`;
      this.setRange(name, pair[0], pair[1]);
    };
    lo.addEventListener("input", () => apply("lo"));
    hi.addEventListener("input", () => apply("hi"));

    wrap.append(label, lo, hi, readout);
    return wrap;
  }

  setUserId(id: string): Promise<void> {
    this.state.userId = id.trim();
    return this.refresh();
  }

  setSource(source: Source): Promise<void> {
    this.state.source = source;
    return this.refresh();
  }

  /** Slider moves coalesce into one request per quiet period. */
  setRange(name: AttributeName, lo: number, hi: number): void {
    this.state.ranges[name] = clampPair(lo, hi, "hi");
    this.debouncer.run(() => {
      void this.refresh();
    });
  }

  async refresh(): Promise<void> {
    this.debouncer.cancel();
    if (!this.state.userId) {
      return;
    }
    const token = this.sequence.issue();
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const playlist = await this.api.fetchRecommendations(
        this.state.userId,
        {
          k: this.state.k,
          source: this.state.source,
          ranges: activeRanges(this.state.ranges),
        },
        controller.signal,
      );
      if (!this.sequence.isCurrent(token)) {
        return; // a newer request finished first; this response is stale
      }
      this.state.playlist = playlist;
      this.state.error = null;
      this.hideBanner();
      this.renderPanels();
    } catch (error) {
      if (!this.sequence.isCurrent(token)) {
        return; // aborted by a newer request
      }
      if (error instanceof ApiError) {
        if (error.code === "unknown_user") {
          // keep whatever playlist is on screen, just say who is missing
          this.state.error = `No listener '${this.state.userId}' in the corpus.`;
          this.showBanner(this.state.error, false);
        } else {
          this.state.error = error.message;
          this.showBanner(error.message, false);
        }
      } else {
        this.state.error = "The recommendation service is not reachable.";
        this.showBanner(this.state.error, true);
      }
    }
  }

  async explain(entry: PlaylistEntry): Promise<void> {
    this.state.selectedSong = entry.song;
    const song = entry.explanation_song || entry.song;
    try {
      const explanation = await this.api.fetchExplanation(this.state.userId, song);
      this.state.explanation = explanation;
      renderExplanation(this.explanationPanel, explanation);
    } catch {
      this.state.explanation = null;
      renderExplanation(this.explanationPanel, null, "Explanation unavailable.");
    }
  }

  private renderPanels(): void {
    renderPlaylist(this.playlistPanel, this.state.playlist, (entry) => {
      void this.explain(entry);
    });
    renderAttributeChart(this.chartPanel, this.state.playlist);
    if (!this.state.explanation) {
      renderExplanation(this.explanationPanel, null);
    }
  }

  private showBanner(message: string, retry: boolean): void {
    this.banner.textContent = "";
    this.banner.hidden = false;
    const text = document.createElement("span");
    text.textContent = message;
    this.banner.appendChild(text);
    if (retry) {
      const button = document.createElement("button");
      button.className = "retry";
      button.type = "button";
      button.textContent = "Retry";
      button.addEventListener("click", () => {
        void this.refresh();
      });
      this.banner.appendChild(button);
    }
  }

  private hideBanner(): void {
    this.banner.hidden = true;
    this.banner.textContent = "";
  }
}
