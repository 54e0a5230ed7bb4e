import type { ApiClient } from "./api";
import { ApiError } from "./api";
import type { TaxonomyDoc } from "./types";
import { HARM_KINDS } from "./types";
import { causeOptions, FormModel, harmOptions, severityOptions } from "./formModel";
import { SUMMARY_WORD_LIMIT } from "./wordCount";

/**
 * Incident submission form. Every taxonomy-typed picker (severity, causes,
 * harm kinds) is populated verbatim from the taxonomy document served by
 * the API; free text appears only where the schema allows it. The submit
 * button is enabled exactly when client-side validation passes; the server
 * remains authoritative and its violations are anchored to fields.
 */
export class SubmissionForm {
  readonly root: HTMLElement;
  readonly model = new FormModel();
  private client: ApiClient;
  private taxonomy: TaxonomyDoc;

  constructor(container: HTMLElement, client: ApiClient, taxonomy: TaxonomyDoc) {
    this.client = client;
    this.taxonomy = taxonomy;
    this.root = document.createElement("form");
    this.root.className = "submission-form";
    this.root.addEventListener("submit", (event) => event.preventDefault());
    container.appendChild(this.root);
    this.render();
  }

  private render(): void {
    const severities = severityOptions(this.taxonomy)
      .map((label) => `<option value="${label}">${label}</option>`)
      .join("");
    const causes = causeOptions(this.taxonomy)
      .map(
        ({ label, value }) => `
        <label class="cause-option">
          <input type="checkbox" data-cause="${value}"> ${label}
        </label>`,
      )
      .join("");
    const harms = harmOptions(this.taxonomy)
      .map(
        ({ label, kind }) => `
        <div class="harm-row" data-harm-row="${kind}">
          <label><input type="checkbox" data-harm="${kind}"> ${label}</label>
          <input type="text" data-harm-description="${kind}" placeholder="description (optional)" disabled>
          <span class="field-error" data-error-for="harms.${kind}"></span>
        </div>`,
      )
      .join("");

    this.root.innerHTML = `
      <div class="field"><label>Title
        <input type="text" data-field="incident_title" required></label>
        <span class="field-error" data-error-for="incident_title"></span></div>
      <div class="field"><label>Summary
        <textarea data-field="incident_summary" rows="6"></textarea></label>
        <span class="word-counter" data-word-counter data-state="ok">0 / ${SUMMARY_WORD_LIMIT} words</span>
        <span class="field-error" data-error-for="incident_summary"></span></div>
      <div class="field"><label>Date (ISO)
        <input type="text" data-field="incident_date" placeholder="2024-05-01"></label>
        <span class="field-error" data-error-for="incident_date"></span></div>
      <div class="field"><label>Locations (CC: region; CC)
        <input type="text" data-field="incident_locations" placeholder="US: California; DE"></label>
        <span class="field-error" data-error-for="incident_locations"></span></div>
      <div class="field"><label>Affected parties (; separated)
        <input type="text" data-field="affected_parties"></label>
        <span class="field-error" data-error-for="affected_parties"></span></div>
      <div class="field"><label>Sectors impacted (; separated)
        <input type="text" data-field="sectors_impacted"></label>
        <span class="field-error" data-error-for="sectors_impacted"></span></div>
      <div class="field"><label>Issues (; separated)
        <input type="text" data-field="incident_issues"></label>
        <span class="field-error" data-error-for="incident_issues"></span></div>
      <div class="field"><label>AI application names (; separated)
        <input type="text" data-field="ai_application_names"></label>
        <span class="field-error" data-error-for="ai_application_names"></span></div>
      <div class="field"><label>Application version
        <input type="text" data-field="application_version"></label>
        <span class="field-error" data-error-for="application_version"></span></div>
      <div class="field"><label>Technologies (; separated)
        <input type="text" data-field="application_technologies"></label>
        <span class="field-error" data-error-for="application_technologies"></span></div>
      <div class="field"><label>Purposes (; separated)
        <input type="text" data-field="application_purposes"></label>
        <span class="field-error" data-error-for="application_purposes"></span></div>
      <div class="field"><label>Deployer
        <input type="text" data-field="application_deployer"></label>
        <span class="field-error" data-error-for="application_deployer"></span></div>
      <div class="field"><label>Developer
        <input type="text" data-field="application_developer"></label>
        <span class="field-error" data-error-for="application_developer"></span></div>
      <div class="field"><label>Transparency note
        <input type="text" data-field="application_transparency" placeholder="what is known about system transparency"></label>
        <span class="field-error" data-error-for="application_transparency"></span></div>
      <div class="field"><label>Severity
        <select data-field="incident_severity">
          <option value="">(unclassified)</option>
          ${severities}
        </select></label>
        <span class="field-error" data-error-for="incident_severity"></span></div>
      <fieldset class="field"><legend>Causes of failure</legend>${causes}
        <span class="field-error" data-error-for="incident_causes"></span></fieldset>
      <fieldset class="field"><legend>Harms</legend>${harms}</fieldset>
      <div class="field"><label>Link
        <input type="text" data-field="incident_link" placeholder="https://"></label>
        <span class="field-error" data-error-for="incident_link"></span></div>
      <fieldset class="field"><legend>Submitter details (redacted from public views)</legend>
        <label>Name <input type="text" data-field="submitter_name"></label>
        <label>Email <input type="text" data-field="submitter_email"></label>
        <label>News sources (; separated) <input type="text" data-field="incident_news_sources"></label>
        <label>Extra information <textarea data-field="submitter_extra_info" rows="2"></textarea></label>
      </fieldset>
      <button type="button" data-submit disabled>Submit incident</button>
      <div class="form-banner" data-banner hidden></div>
    `;
    this.bind();
    this.refresh();
  }

  private bind(): void {
    const fieldBindings: [string, (value: string) => void][] = [
      ["incident_title", (v) => (this.model.title = v)],
      ["incident_summary", (v) => (this.model.summary = v)],
      ["incident_date", (v) => (this.model.date = v)],
      ["incident_locations", (v) => (this.model.locations = v)],
      ["affected_parties", (v) => (this.model.affectedParties = v)],
      ["sectors_impacted", (v) => (this.model.sectors = v)],
      ["incident_issues", (v) => (this.model.issues = v)],
      ["ai_application_names", (v) => (this.model.applicationNames = v)],
      ["application_version", (v) => (this.model.applicationVersion = v)],
      ["application_technologies", (v) => (this.model.technologies = v)],
      ["application_purposes", (v) => (this.model.purposes = v)],
      ["application_deployer", (v) => (this.model.deployer = v)],
      ["application_developer", (v) => (this.model.developer = v)],
      ["application_transparency", (v) => (this.model.transparencyNote = v)],
      ["incident_severity", (v) => (this.model.severity = v)],
      ["incident_link", (v) => (this.model.link = v)],
      ["submitter_name", (v) => (this.model.submitterName = v)],
      ["submitter_email", (v) => (this.model.submitterEmail = v)],
      ["incident_news_sources", (v) => (this.model.newsSources = v)],
      ["submitter_extra_info", (v) => (this.model.extraInfo = v)],
    ];
    for (const [field, assign] of fieldBindings) {
      const element = this.input(field);
      element.addEventListener("input", () => {
        assign(element.value);
        this.refresh();
      });
      element.addEventListener("change", () => {
        assign(element.value);
        this.refresh();
      });
    }
    for (const checkbox of this.root.querySelectorAll<HTMLInputElement>("[data-cause]")) {
      checkbox.addEventListener("change", () => {
        const value = checkbox.dataset.cause!;
        if (checkbox.checked) this.model.causes.add(value);
        else this.model.causes.delete(value);
        this.refresh();
      });
    }
    for (const kind of HARM_KINDS) {
      const flag = this.root.querySelector<HTMLInputElement>(`[data-harm="${kind}"]`)!;
      const description = this.root.querySelector<HTMLInputElement>(
        `[data-harm-description="${kind}"]`,
      )!;
      flag.addEventListener("change", () => {
        this.model.harms[kind].present = flag.checked;
        description.disabled = !flag.checked;
        if (!flag.checked) {
          description.value = "";
          this.model.harms[kind].description = "";
        }
        this.refresh();
      });
      description.addEventListener("input", () => {
        this.model.harms[kind].description = description.value;
        this.refresh();
      });
    }
    this.submitButton().addEventListener("click", () => void this.submit());
  }

  input(field: string): HTMLInputElement {
    return this.root.querySelector(`[data-field="${field}"]`) as HTMLInputElement;
  }

  submitButton(): HTMLButtonElement {
    return this.root.querySelector("[data-submit]") as HTMLButtonElement;
  }

  wordCounter(): HTMLElement {
    return this.root.querySelector("[data-word-counter]") as HTMLElement;
  }

  banner(): HTMLElement {
    return this.root.querySelector("[data-banner]") as HTMLElement;
  }

  /** Re-evaluate validation state: counter, inline errors, submit gating. */
  refresh(): void {
    const words = this.model.summaryWordCount();
    const counter = this.wordCounter();
    counter.textContent = `${words} / ${SUMMARY_WORD_LIMIT} words`;
    counter.dataset.state = this.model.summaryWithinLimit() ? "ok" : "over";

    const errors = this.model.fieldErrors();
    for (const span of this.root.querySelectorAll<HTMLElement>("[data-error-for]")) {
      const field = span.dataset.errorFor!;
      span.textContent = errors[field] ?? "";
    }
    this.submitButton().disabled = !this.model.canSubmit();
  }

  async submit(): Promise<void> {
    if (!this.model.canSubmit()) return;
    const banner = this.banner();
    banner.hidden = true;
    try {
      const result = await this.client.submitIncident(this.model.toDocument());
      this.model.serverErrors = {};
      banner.hidden = false;
      banner.dataset.kind = "success";
      banner.textContent = `Submitted as ${result.incident_id}; awaiting review.`;
      this.refresh();
    } catch (error) {
      if (error instanceof ApiError && error.violations.length) {
        this.model.applyServerViolations(error.violations);
      } else if (error instanceof ApiError) {
        banner.hidden = false;
        banner.dataset.kind = "error";
        banner.textContent = `${error.code}: ${error.message}`;
      } else {
        banner.hidden = false;
        banner.dataset.kind = "error";
        banner.textContent = String(error);
      }
      this.refresh();
    }
  }
}
