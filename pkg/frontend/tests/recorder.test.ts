import { describe, expect, it } from "vitest";

import type { ConfigMessage, VpMessage } from "../src/protocol.js";
import { TrialRecorder } from "../src/recorder.js";

const ECHO: ConfigMessage = {
  type: "config",
  t: 0,
  mode: "afc",
  T: 0.1,
  engine_version: "test",
  a: -1,
  b: -1,
};

function vp(t: number, x: number, v = 0): VpMessage {
  return { type: "vp", t, x, v };
}

describe("TrialRecorder", () => {
  it("requires a config echo before producing a file", () => {
    const rec = new TrialRecorder();
    expect(rec.started).toBe(false);
    expect(() => rec.toJsonl()).toThrow();
  });

  it("writes a header line followed by one record per tick", () => {
    const rec = new TrialRecorder();
    rec.reset(ECHO);
    rec.noteHuman(0.1);
    rec.addVp(vp(0.0, 0.0));
    rec.noteHuman(0.2);
    rec.addVp(vp(0.1, 0.05, -0.3));
    const lines = rec.toJsonl().trim().split("\n");
    expect(lines).toHaveLength(3);

    const head = JSON.parse(lines[0]);
    expect(head.header.config.mode).toBe("afc");
    expect(head.header.config.T).toBe(0.1);
    expect(head.header.live).toBe(true);

    const first = JSON.parse(lines[1]);
    expect(first).toMatchObject({ t: 0, hp_x: 0.1, vp_x: 0, vp_v: 0 });
    const second = JSON.parse(lines[2]);
    expect(second.vp_x).toBe(0.05);
    expect(second.vp_v).toBe(-0.3);
  });

  it("differences the held human samples into hp_v_hat", () => {
    const rec = new TrialRecorder();
    rec.reset(ECHO);
    rec.noteHuman(0.0);
    rec.addVp(vp(0.0, 0));
    rec.noteHuman(0.2);
    rec.addVp(vp(0.1, 0));
    rec.addVp(vp(0.2, 0)); // dropout: sample held, derivative zero
    const lines = rec.toJsonl().trim().split("\n").slice(1);
    const vHats = lines.map((ln) => JSON.parse(ln).hp_v_hat);
    expect(vHats[0]).toBe(0);
    expect(vHats[1]).toBeCloseTo(2.0, 12);
    expect(vHats[2]).toBe(0);
  });

  it("starts a fresh trial on each config echo", () => {
    const rec = new TrialRecorder();
    rec.reset(ECHO);
    rec.addVp(vp(0.0, 0));
    expect(rec.length).toBe(1);
    rec.reset({ ...ECHO, mode: "opc-follower" });
    expect(rec.length).toBe(0);
    const head = JSON.parse(rec.toJsonl().trim().split("\n")[0]);
    expect(head.header.config.mode).toBe("opc-follower");
  });

  it("ignores vp messages before the first handshake", () => {
    const rec = new TrialRecorder();
    rec.addVp(vp(0.0, 0));
    expect(rec.length).toBe(0);
  });
});
