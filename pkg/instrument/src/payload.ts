/**
 * Builder for the page-context instrumentation script.
 *
 * The emitted script must be evaluated before any page script runs. It
 * replaces the native blocking dialog functions with recording stubs that
 * return the "dismiss" value immediately, so a hostile page can neither trap
 * the crawler nor tell it apart from a user closing every dialog. Once the
 * page has loaded and stayed quiet for the configured delay, a single report
 * is posted via postMessage for the driver to collect.
 */

export interface PayloadConfig {
  /** Recording stops (and further dialog calls throw) after this many dialogs. */
  max_dialog_capture: number;
  /** Milliseconds of quiet time after the load event before the postback fires. */
  quiescence_delay_ms?: number;
}

export const DEFAULT_QUIESCENCE_DELAY_MS = 3000;

/** Key wrapping the report in the postMessage envelope. */
export const POSTBACK_KEY = "scamscanReport";

export function buildPayload(config: PayloadConfig): string {
  const cap = config.max_dialog_capture;
  if (!Number.isInteger(cap) || cap < 1) {
    throw new Error(`max_dialog_capture must be an integer >= 1, got ${cap}`);
  }
  const delay = config.quiescence_delay_ms ?? DEFAULT_QUIESCENCE_DELAY_MS;
  if (!Number.isFinite(delay) || delay < 0) {
    throw new Error(`quiescence_delay_ms must be non-negative, got ${delay}`);
  }

  return `(function () {
  'use strict';
  if (window.__scamscanInstrumented) { return; }
  window.__scamscanInstrumented = true;
  var CAP = ${cap};
  var DELAY = ${delay};
  var state = {
    dialogs: [],
    onunload_hooked: false,
    popup_window_count: 0,
    posted: false
  };
  var native = {
    addEventListener: window.addEventListener,
    setTimeout: window.setTimeout,
    postMessage: window.postMessage,
    open: window.open
  };

  function recordDialog(kind, message) {
    if (state.dialogs.length >= CAP) {
      // break hostile dialog loops: the throw unwinds the caller
      throw new Error('scamscan: dialog capture cap (' + CAP + ') reached');
    }
    state.dialogs.push({ kind: kind, message: message === undefined ? '' : String(message) });
  }

  // dismiss values: a user escaping every dialog
  window.alert = function (message) { recordDialog('alert', message); return undefined; };
  window.confirm = function (message) { recordDialog('confirm', message); return false; };
  window.prompt = function (message) { recordDialog('prompt', message); return null; };

  window.open = function () {
    state.popup_window_count += 1;
    return null;
  };

  var UNLOAD_EVENTS = { unload: true, beforeunload: true, pagehide: true };
  window.addEventListener = function (type, listener, options) {
    if (UNLOAD_EVENTS[String(type).toLowerCase()]) { state.onunload_hooked = true; }
    return native.addEventListener.call(window, type, listener, options);
  };
  function hookHandlerSlot(name) {
    try {
      Object.defineProperty(window, name, {
        configurable: true,
        set: function (handler) {
          if (handler) { state.onunload_hooked = true; }
          state['slot_' + name] = handler;
        },
        get: function () { return state['slot_' + name]; }
      });
    } catch (err) {
      // some embedders refuse; the addEventListener path still catches hooks
    }
  }
  hookHandlerSlot('onunload');
  hookHandlerSlot('onbeforeunload');

  function audioAutoplays() {
    try {
      var nodes = document.querySelectorAll('audio');
      for (var i = 0; i < nodes.length; i++) {
        var el = nodes[i];
        if (el.autoplay === true || (el.hasAttribute && el.hasAttribute('autoplay'))) {
          return true;
        }
      }
    } catch (err) { /* no DOM access: report false */ }
    return false;
  }

  function post() {
    if (state.posted) { return; }
    state.posted = true;
    native.postMessage.call(window, {
      ${POSTBACK_KEY}: {
        page_url: window.location.href,
        dialogs: state.dialogs.slice(),
        onunload_hooked: state.onunload_hooked,
        audio_autoplay: audioAutoplays(),
        popup_window_count: state.popup_window_count
      }
    }, '*');
  }
  function schedulePost() { native.setTimeout.call(window, post, DELAY); }
  if (document.readyState === 'complete') { schedulePost(); }
  else { native.addEventListener.call(window, 'load', schedulePost); }
})();
`;
}
