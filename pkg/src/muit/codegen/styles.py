"""Shared stylesheet set: one base sheet plus per-platform variants.

All three sheets ship in every bundle; the runtime enables the variant
matching the device so adaptation needs no server round trip.
"""

BASE_CSS = """\
* { box-sizing: border-box; }

html, body {
  margin: 0;
  padding: 0;
  font-family: system-ui, sans-serif;
  background: #f4f4f6;
  color: #1c1c1e;
}

.screen {
  max-width: 640px;
  margin: 0 auto;
  min-height: 100vh;
  background: #ffffff;
  display: flex;
  flex-direction: column;
}

.screen-header {
  padding: 0.75rem 1rem;
  border-bottom: 1px solid #d8d8dc;
}

.screen-header h1 {
  margin: 0;
  font-size: 1.1rem;
  font-weight: 600;
}

.text { margin: 0.5rem 1rem; }
.label { display: block; margin: 0.5rem 1rem; color: #5c5c61; }

.list {
  list-style: none;
  margin: 0;
  padding: 0;
  flex: 1;
}

.item {
  padding: 0.85rem 1rem;
  border-bottom: 1px solid #ececf0;
  cursor: pointer;
}

.item:active { background: #ececf0; }

.handler {
  display: flex;
  gap: 0.75rem;
  padding: 1rem;
  margin-top: auto;
}

button {
  flex: 1;
  padding: 0.65rem 1rem;
  font-size: 1rem;
  border: 1px solid #c6c6cb;
  border-radius: 6px;
  background: #ffffff;
  cursor: pointer;
}

input, select {
  display: block;
  width: calc(100% - 2rem);
  margin: 0.5rem 1rem;
  padding: 0.5rem;
  font-size: 1rem;
  border: 1px solid #c6c6cb;
  border-radius: 6px;
}

.widget { margin: 0.5rem 0; }

[hidden] { display: none !important; }

.cascade-pane {
  position: fixed;
  top: 0;
  right: 0;
  width: 45%;
  height: 100%;
  background: #ffffff;
  border-left: 1px solid #d8d8dc;
  box-shadow: -4px 0 12px rgba(0, 0, 0, 0.08);
}
"""

IOS_CSS = """\
body {
  font-family: -apple-system, "Helvetica Neue", sans-serif;
}

.screen-header {
  background: #f9f9fb;
  text-align: center;
}

button {
  color: #007aff;
  border-color: #007aff;
  border-radius: 10px;
}

button.back::before { content: "\\2039 "; }
"""

ANDROID_CSS = """\
body {
  font-family: Roboto, "Noto Sans", sans-serif;
}

.screen-header {
  background: #2a6049;
  color: #ffffff;
}

.screen-header h1 { color: #ffffff; }

button {
  color: #ffffff;
  background: #2a6049;
  border: none;
  border-radius: 4px;
  text-transform: uppercase;
  box-shadow: 0 1px 3px rgba(0, 0, 0, 0.3);
}
"""

STYLESHEETS = {
    "styles/base.css": BASE_CSS,
    "styles/ios.css": IOS_CSS,
    "styles/android.css": ANDROID_CSS,
}
