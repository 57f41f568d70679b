/**
 * Questionnaire single-page app: five parts (background, demographics,
 * attack-scenario selection, preliminary filtering, pairwise
 * comparisons), fully driven by the shared taxonomy/scenario config
 * files. No server: state lives in localStorage and the result is a
 * downloaded response file.
 */

import { downloadResponse } from "./export.js";
import { pairKey } from "./queue.js";
import {
  SessionState,
  clear,
  isComplete,
  load,
  newSession,
  pendingPairs,
  pruneAnswers,
  save,
  unanswered,
} from "./session.js";
import {
  QuestionPair,
  SCALE_ANCHORS,
  SCALE_MAX,
  SCALE_MIN,
  ScenarioConfig,
  Taxonomy,
  subcategories,
} from "./types.js";

const DEMOGRAPHIC_FIELDS: Array<[string, string]> = [
  ["years_academic", "Years of academic experience"],
  ["years_industry", "Years of industry experience"],
  ["years_offensive", "Years in offensive security"],
  ["years_defensive", "Years in defensive security"],
  ["education", "Highest degree"],
];

export class QuestionnaireApp {
  state: SessionState;

  constructor(
    private root: HTMLElement,
    private taxonomy: Taxonomy,
    private scenarios: ScenarioConfig,
    private storage: Storage = localStorage,
  ) {
    this.state = load(storage) ?? newSession();
  }

  persist(): void {
    save(this.state, this.storage);
  }

  render(): void {
    this.root.innerHTML = "";
    switch (this.state.step) {
      case "background":
        this.renderBackground();
        break;
      case "demographics":
        this.renderDemographics();
        break;
      case "scenario":
        this.renderScenario();
        break;
      case "filtering":
        this.renderFiltering();
        break;
      case "comparisons":
        this.renderComparisons();
        break;
      case "done":
        this.renderDone();
        break;
    }
    this.persist();
  }

  private heading(text: string): void {
    const h = document.createElement("h2");
    h.textContent = text;
    this.root.appendChild(h);
  }

  private nextButton(label: string, onClick: () => void): HTMLButtonElement {
    const btn = document.createElement("button");
    btn.textContent = label;
    btn.className = "next";
    btn.addEventListener("click", onClick);
    this.root.appendChild(btn);
    return btn;
  }

  private renderBackground(): void {
    this.heading("About this questionnaire");
    const p = document.createElement("p");
    p.textContent =
      "You will pick an attack scenario you know well, drop the device " +
      "aspects that do not matter for detecting it, and compare the " +
      "remaining aspects pairwise. Filtering early keeps the number of " +
      "comparisons small. Your answers are stored locally and exported " +
      "as a file at the end; nothing is uploaded.";
    this.root.appendChild(p);
    this.nextButton("Start", () => {
      this.state.step = "demographics";
      this.render();
    });
  }

  private renderDemographics(): void {
    this.heading("About you (optional, anonymous)");
    for (const [key, label] of DEMOGRAPHIC_FIELDS) {
      const wrap = document.createElement("label");
      wrap.textContent = label + " ";
      const input = document.createElement("input");
      input.name = key;
      input.value = this.state.demographics[key] ?? "";
      input.addEventListener("change", () => {
        if (input.value.trim()) {
          this.state.demographics[key] = input.value.trim();
        } else {
          delete this.state.demographics[key];
        }
        this.persist();
      });
      wrap.appendChild(input);
      this.root.appendChild(wrap);
    }
    this.nextButton("Continue", () => {
      this.state.step = "scenario";
      this.render();
    });
  }

  private renderScenario(): void {
    this.heading("Pick the attack scenario you will assess");
    for (const scenario of this.scenarios.scenarios) {
      const wrap = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "scenario";
      radio.value = scenario.code;
      radio.checked = this.state.scenario === scenario.code;
      radio.addEventListener("change", () => {
        this.state.scenario = scenario.code;
        this.persist();
      });
      wrap.appendChild(radio);
      wrap.appendChild(
        document.createTextNode(
          ` ${scenario.name}${scenario.description ? ": " + scenario.description : ""}`,
        ),
      );
      this.root.appendChild(wrap);
    }
    this.nextButton("Continue", () => {
      if (!this.state.scenario) return;
      this.state.step = "filtering";
      this.render();
    });
  }

  private renderFiltering(): void {
    this.heading("Keep only what matters for detecting this attack");
    const count = document.createElement("p");
    count.id = "question-count";
    this.root.appendChild(count);

    const refreshCount = () => {
      pruneAnswers(this.state, this.taxonomy);
      count.textContent = `${pendingPairs(this.state, this.taxonomy).length} comparisons ahead`;
      this.persist();
    };

    for (const cat of this.taxonomy.categories) {
      const catLabel = document.createElement("label");
      const catBox = document.createElement("input");
      catBox.type = "checkbox";
      catBox.name = `cat-${cat.code}`;
      catBox.checked = this.state.keptCategories.includes(cat.code);
      catBox.addEventListener("change", () => {
        if (catBox.checked) {
          this.state.keptCategories.push(cat.code);
        } else {
          this.state.keptCategories = this.state.keptCategories.filter(
            (c) => c !== cat.code,
          );
          // dropping a category drops its sub-categories too
          const subs = new Set(cat.sub_categories.map((s) => s.code));
          this.state.keptSubcategories = this.state.keptSubcategories.filter(
            (s) => !subs.has(s),
          );
        }
        this.render();
      });
      catLabel.appendChild(catBox);
      catLabel.appendChild(document.createTextNode(` ${cat.code}: ${cat.name}`));
      this.root.appendChild(catLabel);

      if (!this.state.keptCategories.includes(cat.code)) continue;
      for (const sub of cat.sub_categories) {
        const subLabel = document.createElement("label");
        subLabel.className = "sub";
        const subBox = document.createElement("input");
        subBox.type = "checkbox";
        subBox.name = `sub-${sub.code}`;
        subBox.checked = this.state.keptSubcategories.includes(sub.code);
        subBox.addEventListener("change", () => {
          if (subBox.checked) {
            this.state.keptSubcategories.push(sub.code);
          } else {
            this.state.keptSubcategories = this.state.keptSubcategories.filter(
              (s) => s !== sub.code,
            );
          }
          refreshCount();
        });
        subLabel.appendChild(subBox);
        subLabel.appendChild(document.createTextNode(` ${sub.code}: ${sub.name}`));
        this.root.appendChild(subLabel);
      }
    }
    refreshCount();
    this.nextButton("Start comparisons", () => {
      if (this.state.keptSubcategories.length === 0) {
        count.textContent =
          "Keep at least one sub-category (or export an empty response is meaningless).";
        return;
      }
      this.state.step = "comparisons";
      this.render();
    });
  }

  private labelFor(pair: QuestionPair): [string, string] {
    if (pair.kind === "subcategory") {
      const subs = subcategories(this.taxonomy);
      const a = subs.find((s) => s.code === pair.left)!;
      const b = subs.find((s) => s.code === pair.right)!;
      return [a.name, b.name];
    }
    const features = subcategories(this.taxonomy).flatMap((s) => s.features);
    const a = features.find((f) => f.code === pair.left)!;
    const b = features.find((f) => f.code === pair.right)!;
    return [a.name, b.name];
  }

  private renderComparisons(): void {
    const queue = unanswered(this.state, this.taxonomy);
    const total = pendingPairs(this.state, this.taxonomy).length;
    if (queue.length === 0) {
      this.state.step = "done";
      this.render();
      return;
    }
    const pair = queue[0];
    this.heading(`Comparison ${total - queue.length + 1} of ${total}`);

    const [leftName, rightName] = this.labelFor(pair);
    const prompt = document.createElement("p");
    prompt.id = "pair-prompt";
    prompt.textContent =
      `Which matters more for detecting this attack: ` +
      `${pair.left} (${leftName}) or ${pair.right} (${rightName})?`;
    this.root.appendChild(prompt);

    const slider = document.createElement("input");
    slider.type = "range";
    slider.id = "judgment";
    slider.min = String(SCALE_MIN);
    slider.max = String(SCALE_MAX);
    slider.step = "1";
    slider.value = "0";
    this.root.appendChild(slider);

    const scaleNote = document.createElement("p");
    scaleNote.className = "anchors";
    scaleNote.textContent =
      `minus favors ${pair.left}, plus favors ${pair.right}; ` +
      Object.entries(SCALE_ANCHORS)
        .map(([k, v]) => `${k} = ${v}`)
        .join(", ");
    this.root.appendChild(scaleNote);

    this.nextButton("Answer", () => {
      const value = Number(slider.value);
      const key = pairKey(pair);
      this.state.answers[key] = value;
      this.render();
    });
    this.nextButton("Submit partial response", () => {
      this.state.step = "done";
      this.render();
    });
  }

  private renderDone(): void {
    const missing = unanswered(this.state, this.taxonomy).length;
    this.heading(
      missing === 0
        ? "All comparisons answered"
        : `Submitted with ${missing} unanswered comparison(s)`,
    );
    const note = document.createElement("p");
    note.textContent = isComplete(this.state, this.taxonomy)
      ? "Download the response file and send it to the study coordinator."
      : "The file will be marked partial; unanswered pairs are filled in downstream.";
    this.root.appendChild(note);
    this.nextButton("Download response file", () => {
      downloadResponse(this.state, this.taxonomy);
    });
    this.nextButton("Start over", () => {
      clear(this.storage);
      this.state = newSession();
      this.render();
    });
  }
}

export async function boot(root: HTMLElement): Promise<QuestionnaireApp> {
  const [taxonomy, scenarios] = await Promise.all([
    fetch("config/taxonomy.json").then((r) => r.json() as Promise<Taxonomy>),
    fetch("config/scenarios.json").then((r) => r.json() as Promise<ScenarioConfig>),
  ]);
  const app = new QuestionnaireApp(root, taxonomy, scenarios);
  app.render();
  return app;
}
