import { describe, expect, it } from "vitest";

import { actionForClick, closeArticleMessage, openArticleMessage, setQueryMessage } from "../src/dispatch.js";
import { IDENTITY, scriptedFrame } from "./fixtures.js";

describe("message builders", () => {
  it("builds open_article with world coordinates", () => {
    expect(openArticleMessage("soldier", 120, 80)).toEqual({
      type: "open_article",
      word: "soldier",
      x: 120,
      y: 80,
    });
  });

  it("builds close_article", () => {
    expect(closeArticleMessage("article-1")).toEqual({ type: "close_article", id: "article-1" });
  });

  it("splits query strings and rejects empty ones", () => {
    expect(setQueryMessage("soldier  bragg ")).toEqual({ type: "set_query", terms: ["soldier", "bragg"] });
    expect(setQueryMessage("")).toBeNull();
    expect(setQueryMessage("   ")).toBeNull();
    expect(setQueryMessage([])).toBeNull();
  });
});

describe("actionForClick", () => {
  const frame = scriptedFrame();

  it("word click opens its article at the click point", () => {
    expect(actionForClick(frame, IDENTITY, 120, 80, false)).toEqual({
      type: "open_article",
      word: "soldier",
      x: 120,
      y: 80,
    });
  });

  it("modifier-click on a word issues a new query for it", () => {
    expect(actionForClick(frame, IDENTITY, 400, 300, true)).toEqual({
      type: "set_query",
      terms: ["bragg"],
    });
  });

  it("empty space and article cards produce no message", () => {
    expect(actionForClick(frame, IDENTITY, 5, 990, false)).toBeNull();
    expect(actionForClick(frame, IDENTITY, 800, 200, false)).toBeNull();
  });
});
