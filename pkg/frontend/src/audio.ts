/**
 * Thin playback seam. The app only ever plays server-provided WAV URLs;
 * tests swap in a recording player since headless DOMs have no audio output.
 */

export interface AudioPlayer {
  play(url: string): Promise<void>;
  stop(): void;
}

export class HtmlAudioPlayer implements AudioPlayer {
  private element: HTMLAudioElement | null = null;

  async play(url: string): Promise<void> {
    this.stop();
    this.element = new Audio(url);
    await this.element.play();
  }

  stop(): void {
    if (this.element) {
      this.element.pause();
      this.element = null;
    }
  }
}
