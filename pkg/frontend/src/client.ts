// Reconnecting session client. Outgoing messages queue while the socket
// is down and flush on reconnect; the last query is replayed after a
// resume so the stream picks up where the user left it.

import {
  type ClientMessage,
  type ServerMessage,
  parseServerMessage,
} from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  socketFactory?: SocketFactory;
  onMessage?: (message: ServerMessage) => void;
  onStatus?: (status: "connecting" | "open" | "closed") => void;
  backoffBaseMs?: number;
  backoffMaxMs?: number;
}

const defaultFactory: SocketFactory = (url) =>
  new (globalThis as { WebSocket: new (url: string) => SocketLike }).WebSocket(url);

export class SessionClient {
  private socket: SocketLike | null = null;
  private queue: string[] = [];
  private attempts = 0;
  private lastQuery: string | null = null;
  private disposed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly url: string,
    private readonly options: ClientOptions = {},
  ) {}

  connect(): void {
    if (this.disposed) {
      return;
    }
    this.options.onStatus?.("connecting");
    const factory = this.options.socketFactory ?? defaultFactory;
    const socket = factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.options.onStatus?.("open");
      if (this.lastQuery !== null) {
        socket.send(this.lastQuery);
      }
      for (const payload of this.queue.splice(0)) {
        socket.send(payload);
      }
    };
    socket.onmessage = (event) => {
      const message = parseServerMessage(String(event.data));
      if (message !== null) {
        this.options.onMessage?.(message);
      }
    };
    socket.onerror = () => {
      // close follows; reconnect is scheduled there
    };
    socket.onclose = () => {
      this.socket = null;
      this.options.onStatus?.("closed");
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    if (this.disposed || this.reconnectTimer !== null) {
      return;
    }
    const base = this.options.backoffBaseMs ?? 500;
    const max = this.options.backoffMaxMs ?? 30_000;
    const delay = Math.min(max, base * 2 ** this.attempts);
    this.attempts += 1;
    this.reconnectTimer = setTimeout(() => {
      this.reconnectTimer = null;
      this.connect();
    }, delay);
  }

  /** Send now when connected, otherwise queue until the next open. */
  send(message: ClientMessage): void {
    const payload = JSON.stringify(message);
    if (message.type === "set_query") {
      this.lastQuery = payload;
    }
    if (this.socket !== null && this.isOpen()) {
      this.socket.send(payload);
    } else {
      this.queue.push(payload);
    }
  }

  queuedCount(): number {
    return this.queue.length;
  }

  private isOpen(): boolean {
    const state = (this.socket as { readyState?: number } | null)?.readyState;
    return state === undefined || state === 1;
  }

  dispose(): void {
    this.disposed = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
    this.socket = null;
  }
}
