/**
 * Minimal page-context double: enough of window/document for the payload to
 * run outside a browser, with manual control over the load event and timers.
 */

type Listener = (...args: unknown[]) => unknown;

export interface FakePage {
  window: any;
  document: any;
  messages: any[];
  fireLoad(): void;
  flushTimers(): void;
  pendingTimers(): number;
  addAudioElement(autoplay: boolean): void;
}

export function makePage(url = "http://scam-landing.example/alert?aff=3"): FakePage {
  const listeners = new Map<string, Listener[]>();
  const timers: { fn: Listener; ms: number }[] = [];
  const messages: any[] = [];
  const audioElements: { autoplay: boolean }[] = [];

  const window: any = {
    location: { href: url },
    // stand-ins for the native blocking functions the payload replaces
    alert: () => undefined,
    confirm: () => true,
    prompt: () => "typed text",
    open: () => ({ closed: false }),
    addEventListener: (type: string, fn: Listener) => {
      const bucket = listeners.get(type) ?? [];
      bucket.push(fn);
      listeners.set(type, bucket);
    },
    postMessage: (msg: unknown) => {
      messages.push(msg);
    },
    setTimeout: (fn: Listener, ms: number) => {
      timers.push({ fn, ms });
      return timers.length;
    },
  };

  const document: any = {
    readyState: "loading",
    querySelectorAll: (selector: string) => (selector.startsWith("audio") ? audioElements.slice() : []),
  };

  return {
    window,
    document,
    messages,
    fireLoad() {
      document.readyState = "complete";
      for (const fn of listeners.get("load") ?? []) fn();
    },
    flushTimers() {
      for (const { fn } of timers.splice(0)) fn();
    },
    pendingTimers: () => timers.length,
    addAudioElement(autoplay: boolean) {
      audioElements.push({ autoplay });
    },
  };
}

/** Evaluate the payload in the fake page, the way a driver would at document_start. */
export function inject(page: FakePage, payload: string): void {
  new Function("window", "document", payload)(page.window, page.document);
}

/** Run the page to completion and return the single postback envelope. */
export function completePage(page: FakePage): any {
  page.fireLoad();
  page.flushTimers();
  if (page.messages.length !== 1) {
    throw new Error(`expected exactly one postback, saw ${page.messages.length}`);
  }
  return page.messages[0];
}
