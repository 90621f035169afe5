/** Audio and prefetch abstractions.
 *
 * Controllers never touch HTMLAudioElement directly; they depend on these
 * two interfaces so tests can substitute scripted implementations and the
 * browser entry point can wire real <audio> elements and fetch prefetching.
 */

export interface AudioPlayer {
  /** Start playing the stimulus at `url`; resolves when playback ends. */
  play(url: string): Promise<void>;
}

export interface Prefetcher {
  /** Fully download the stimulus at `url`; rejects on network failure. */
  prefetch(url: string): Promise<void>;
}

/** Browser implementation: prefetch via fetch into object URLs, play via
 * a single reusable Audio element (at most one stimulus audible at once). */
export class BrowserAudio implements AudioPlayer, Prefetcher {
  private objectUrls = new Map<string, string>();
  private current: HTMLAudioElement | null = null;

  async prefetch(url: string): Promise<void> {
    if (this.objectUrls.has(url)) return;
    const resp = await fetch(url);
    if (!resp.ok) throw new Error(`prefetch failed: ${resp.status}`);
    const blob = await resp.blob();
    this.objectUrls.set(url, URL.createObjectURL(blob));
  }

  play(url: string): Promise<void> {
    if (this.current) this.current.pause();
    const audio = new Audio(this.objectUrls.get(url) ?? url);
    this.current = audio;
    return new Promise((resolve, reject) => {
      audio.onended = () => resolve();
      audio.onerror = () => reject(new Error(`playback failed: ${url}`));
      void audio.play().catch(reject);
    });
  }
}
