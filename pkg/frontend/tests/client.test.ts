import { describe, expect, it } from "vitest";

import { GameClient, SocketLike } from "../src/client.js";
import type { VpMessage } from "../src/protocol.js";
import { UiStore } from "../src/state.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  open(): void {
    this.onopen?.();
  }

  push(doc: unknown): void {
    this.onmessage?.({ data: JSON.stringify(doc) });
  }
}

const ECHO = { type: "config", t: 0, mode: "afc", T: 0.05, a: -1, b: -1 };

function makeClient() {
  const socket = new FakeSocket();
  const store = new UiStore();
  const rendered: VpMessage[] = [];
  let clock = 1000;
  const client = new GameClient({
    url: "ws://test/ws",
    socketFactory: () => socket,
    renderVp: (msg) => rendered.push(msg),
    store,
    now: () => (clock += 16),
  });
  return { socket, store, rendered, client };
}

describe("GameClient handshake", () => {
  it("sends config as the first frame and resolves on the echo", async () => {
    const { socket, store, client } = makeClient();
    const handshake = client.connect({ mode: "afc" });
    expect(store.get().connection).toBe("connecting");
    socket.open();
    expect(JSON.parse(socket.sent[0])).toMatchObject({
      type: "config",
      mode: "afc",
    });
    socket.push(ECHO);
    const echo = await handshake;
    expect(echo.T).toBe(0.05);
    expect(store.get().connection).toBe("connected");
    expect(store.get().tickPeriod).toBe(0.05);
  });

  it("rejects the handshake when the connection drops first", async () => {
    const { socket, client } = makeClient();
    const handshake = client.connect({ mode: "afc" });
    socket.open();
    socket.onclose?.();
    await expect(handshake).rejects.toThrow();
  });
});

describe("rendered positions come only from server vp messages", () => {
  it("forwards each vp payload to the renderer untouched", async () => {
    const { socket, rendered, client, store } = makeClient();
    const handshake = client.connect({ mode: "afc" });
    socket.open();
    socket.push(ECHO);
    await handshake;
    const payloads = [
      { type: "vp", t: 0.0, x: 0.017453292, v: -0.25 },
      { type: "vp", t: 0.05, x: -0.499999999, v: 1.75 },
      { type: "vp", t: 0.1, x: 0.3333333333333333, v: 0 },
    ];
    for (const p of payloads) socket.push(p);
    expect(rendered.map((m) => m.x)).toEqual(payloads.map((p) => p.x));
    expect(rendered.map((m) => m.t)).toEqual(payloads.map((p) => p.t));
    expect(store.get().vpX).toBe(payloads[2].x);
  });
});

describe("pointer input rate limiting", () => {
  async function connected() {
    const parts = makeClient();
    const handshake = parts.client.connect({ mode: "afc" });
    parts.socket.open();
    parts.socket.push(ECHO);
    await handshake;
    parts.socket.sent.length = 0;
    return parts;
  }

  it("sends at most one hp message per frame, latest position wins", async () => {
    const { socket, client } = await connected();
    client.pointerInput(0.1);
    client.pointerInput(0.2);
    client.pointerInput(0.3);
    expect(client.frame()).toBe(true);
    expect(client.frame()).toBe(false); // nothing pending: no second send
    expect(socket.sent).toHaveLength(1);
    expect(JSON.parse(socket.sent[0])).toMatchObject({ type: "hp", x: 0.3 });
  });

  it("clamps pointer positions to the arena", async () => {
    const { socket, client } = await connected();
    client.pointerInput(7.5);
    client.frame();
    expect(JSON.parse(socket.sent[0]).x).toBe(0.5);
  });

  it("stamps strictly increasing client times", async () => {
    const { socket, client } = await connected();
    for (let k = 0; k < 5; k++) {
      client.pointerInput(0.01 * k);
      client.frame();
    }
    const times = socket.sent.map((s) => JSON.parse(s).t as number);
    for (let k = 1; k < times.length; k++) {
      expect(times[k]).toBeGreaterThan(times[k - 1]);
    }
  });

  it("does not send while a config handshake is pending", async () => {
    const { socket, client } = await connected();
    void client.switchConfig({ mode: "opc-follower" }).catch(() => {});
    socket.sent.length = 0;
    client.pointerInput(0.2);
    expect(client.frame()).toBe(false);
    expect(socket.sent).toHaveLength(0);
  });
});

describe("mode switching", () => {
  it("sends a fresh config frame and resolves on the new echo", async () => {
    const { socket, client, store } = makeClient();
    const first = client.connect({ mode: "afc" });
    socket.open();
    socket.push(ECHO);
    await first;

    const second = client.switchConfig({ mode: "opc-follower" });
    const sentConfigs = socket.sent
      .map((s) => JSON.parse(s))
      .filter((d) => d.type === "config");
    expect(sentConfigs).toHaveLength(2);
    expect(sentConfigs[1].mode).toBe("opc-follower");

    socket.push({
      type: "config",
      t: 0,
      mode: "opc-follower",
      T: 0.05,
      theta_p: 0.9,
      theta_sigma: 0.1,
    });
    const echo = await second;
    expect(echo.mode).toBe("opc-follower");
    expect(echo.theta_p).toBe(0.9);
    expect(store.get().connection).toBe("connected");
  });

  it("restarts the trial recorder on the new handshake", async () => {
    const { socket, client } = makeClient();
    const first = client.connect({ mode: "afc" });
    socket.open();
    socket.push(ECHO);
    await first;
    socket.push({ type: "vp", t: 0, x: 0.1, v: 0 });
    expect(client.recorder.length).toBe(1);

    const second = client.switchConfig({ mode: "opc-follower" });
    socket.push({ type: "config", t: 0, mode: "opc-follower", T: 0.05 });
    await second;
    expect(client.recorder.length).toBe(0);
  });
});

describe("error and close handling", () => {
  it("surfaces server error frames in the state", async () => {
    const { socket, client, store } = makeClient();
    const handshake = client.connect({ mode: "afc" });
    socket.open();
    socket.push(ECHO);
    await handshake;
    socket.push({ type: "error", t: 1, message: "client silent" });
    expect(store.get().connection).toBe("error");
    expect(store.get().statusMessage).toContain("silent");
  });

  it("marks the state disconnected when the socket closes", async () => {
    const { socket, client, store } = makeClient();
    const handshake = client.connect({ mode: "afc" });
    socket.open();
    socket.push(ECHO);
    await handshake;
    socket.onclose?.();
    expect(store.get().connection).toBe("disconnected");
  });

  it("flags malformed server frames without throwing", async () => {
    const { socket, client, store } = makeClient();
    const handshake = client.connect({ mode: "afc" });
    socket.open();
    socket.push(ECHO);
    await handshake;
    socket.onmessage?.({ data: "{nope" });
    expect(store.get().connection).toBe("error");
  });
});
