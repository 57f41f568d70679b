import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { ScenarioConfig, Taxonomy } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

// the canonical config files, straight from the scoring package
const dataDir = join(here, "..", "..", "src", "dscore", "data");

export function loadTaxonomy(): Taxonomy {
  return JSON.parse(readFileSync(join(dataDir, "taxonomy.json"), "utf-8"));
}

export function loadScenarios(): ScenarioConfig {
  return JSON.parse(readFileSync(join(dataDir, "scenarios.json"), "utf-8"));
}

export function fixturePath(name: string): string {
  return join(here, "..", "fixtures", name);
}

/** Minimal in-memory Storage for node-side session tests. */
export class MemoryStorage implements Storage {
  private map = new Map<string, string>();
  get length(): number {
    return this.map.size;
  }
  clear(): void {
    this.map.clear();
  }
  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }
  key(index: number): string | null {
    return [...this.map.keys()][index] ?? null;
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}
