/**
 * Playback model for saved session logs: scrub to any time, play and
 * pause, always showing exactly the logged positions for that tick.
 */

export interface ReplayRecord {
  t: number;
  hp_x: number;
  vp_x: number;
  vp_v?: number;
}

export class ReplayLoadError extends Error {}

function asFinite(doc: Record<string, unknown>, key: string, line: number): number {
  const value = doc[key];
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ReplayLoadError(`record on line ${line} lacks a finite '${key}'`);
  }
  return value;
}

/** Parse the session-log file format; throws ReplayLoadError if bad. */
export function parseSessionLog(text: string): ReplayRecord[] {
  const lines = text.split("\n").filter((ln) => ln.trim().length > 0);
  if (lines.length === 0) throw new ReplayLoadError("empty log file");
  let head: unknown;
  try {
    head = JSON.parse(lines[0]);
  } catch (exc) {
    throw new ReplayLoadError(`malformed header: ${(exc as Error).message}`);
  }
  if (typeof head !== "object" || head === null || !("header" in head)) {
    throw new ReplayLoadError("log must start with a header line");
  }
  const records: ReplayRecord[] = [];
  for (let i = 1; i < lines.length; i++) {
    let doc: unknown;
    try {
      doc = JSON.parse(lines[i]);
    } catch (exc) {
      throw new ReplayLoadError(
        `malformed record on line ${i + 1}: ${(exc as Error).message}`,
      );
    }
    const rec = doc as Record<string, unknown>;
    records.push({
      t: asFinite(rec, "t", i + 1),
      hp_x: asFinite(rec, "hp_x", i + 1),
      vp_x: asFinite(rec, "vp_x", i + 1),
      vp_v: typeof rec.vp_v === "number" ? rec.vp_v : undefined,
    });
  }
  if (records.length === 0) throw new ReplayLoadError("log has no records");
  return records;
}

export class ReplayModel {
  readonly records: ReplayRecord[];
  private index = 0;
  private playing = false;

  constructor(logText: string) {
    this.records = parseSessionLog(logText);
  }

  get startTime(): number {
    return this.records[0].t;
  }

  get endTime(): number {
    return this.records[this.records.length - 1].t;
  }

  get duration(): number {
    return this.endTime - this.startTime;
  }

  get isPlaying(): boolean {
    return this.playing;
  }

  get current(): ReplayRecord {
    return this.records[this.index];
  }

  /** Jump to the last record at or before the given time. */
  seek(t: number): ReplayRecord {
    if (t <= this.startTime) {
      this.index = 0;
    } else if (t >= this.endTime) {
      this.index = this.records.length - 1;
    } else {
      let lo = 0;
      let hi = this.records.length - 1;
      while (lo < hi) {
        const mid = (lo + hi + 1) >> 1;
        if (this.records[mid].t <= t) lo = mid;
        else hi = mid - 1;
      }
      this.index = lo;
    }
    return this.current;
  }

  play(): void {
    this.playing = true;
  }

  pause(): void {
    this.playing = false;
  }

  togglePlay(): boolean {
    this.playing = !this.playing;
    return this.playing;
  }

  /**
   * Advance by a wall-clock step scaled by the playback rate; pauses at
   * the end. Returns the record now showing.
   */
  advance(wallSeconds: number, rate = 1): ReplayRecord {
    if (this.playing) {
      const target = this.current.t + wallSeconds * rate;
      this.seek(target);
      if (this.index === this.records.length - 1) this.playing = false;
    }
    return this.current;
  }
}
