/**
 * Trailing-edge debouncer: `run` schedules the action after `delay` ms of
 * quiet, replacing any action still pending. Keeps slider drags from
 * turning into a request per pixel.
 */
export class Debouncer {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private readonly delay: number) {}

  run(action: () => void): void {
    this.cancel();
    this.timer = setTimeout(() => {
      this.timer = null;
      action();
    }, this.delay);
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  get pending(): boolean {
    return this.timer !== null;
  }
}

/**
 * Requests are numbered as they are issued; only the response whose number
 * is still current may be applied. A slow early response arriving after a
 * fast later one is simply dropped.
 */
export class RequestSequence {
  private seq = 0;

  issue(): number {
    return ++this.seq;
  }

  isCurrent(token: number): boolean {
    return token === this.seq;
  }
}
