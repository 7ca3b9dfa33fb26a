// Wire types spoken by the session service. Field names and shapes must
// match the server byte-for-byte; the client never invents layout state.

export interface FrameAgent {
  id: string;
  label: string;
  kind: "word" | "article";
  x: number;
  y: number;
  r: number;
  stress: number;
  freq: number;
}

export interface FrameMessage {
  type: "frame";
  tick: number;
  agents: FrameAgent[];
  mean_speed: number;
  stable: boolean;
}

export interface ArticleMessage {
  type: "article";
  id: string;
  title: string;
  source: string;
  text: string;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export interface OkMessage {
  type: "ok";
  command: string;
}

export type ServerMessage = FrameMessage | ArticleMessage | ErrorMessage | OkMessage;

export interface OpenArticleMessage {
  type: "open_article";
  word: string;
  x: number;
  y: number;
}

export interface CloseArticleMessage {
  type: "close_article";
  id: string;
}

export interface SetQueryMessage {
  type: "set_query";
  terms: string[];
}

export interface PauseMessage {
  type: "pause";
}

export interface ResumeMessage {
  type: "resume";
}

export type ClientMessage =
  | OpenArticleMessage
  | CloseArticleMessage
  | SetQueryMessage
  | PauseMessage
  | ResumeMessage;

export function parseServerMessage(data: string): ServerMessage | null {
  let value: unknown;
  try {
    value = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof value !== "object" || value === null || !("type" in value)) {
    return null;
  }
  const type = (value as { type: unknown }).type;
  if (type === "frame" || type === "article" || type === "error" || type === "ok") {
    return value as ServerMessage;
  }
  return null;
}
