import { WritingPad } from "./pad.js";

interface StaticConfig {
  serviceUrl: string;
  debounceMs: number;
  topn: number;
}

const DEFAULTS: StaticConfig = {
  serviceUrl: "http://127.0.0.1:8077",
  debounceMs: 600,
  topn: 5,
};

async function loadConfig(): Promise<StaticConfig> {
  try {
    const r = await fetch("./pad.config.json");
    if (!r.ok) {
      return DEFAULTS;
    }
    return { ...DEFAULTS, ...(await r.json()) };
  } catch {
    return DEFAULTS;
  }
}

async function bootstrap(): Promise<void> {
  const config = await loadConfig();
  const canvas = document.querySelector<HTMLCanvasElement>("#pad")!;
  const list = document.querySelector<HTMLElement>("#hypotheses")!;
  const status = document.querySelector<HTMLElement>("#status")!;
  const pad = new WritingPad(canvas, list, status, config);
  document.querySelector<HTMLButtonElement>("#clear")!.addEventListener("click", () => pad.clear());
  const correction = document.querySelector<HTMLInputElement>("#correction")!;
  document.querySelector<HTMLButtonElement>("#confirm")!.addEventListener("click", () => {
    if (correction.value.trim()) {
      void pad.confirm(correction.value.trim());
      correction.value = "";
    }
  });
}

void bootstrap();
