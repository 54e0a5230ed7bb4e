import type { HarmKind, IncidentDocument, TaxonomyDoc, Violation } from "./types";
import { HARM_KINDS } from "./types";
import { countWords, SUMMARY_WORD_LIMIT } from "./wordCount";

/**
 * Protocol values for taxonomy labels. The display labels always come from
 * GET /taxonomy; these folds turn a served label into the value the schema
 * expects on the wire. The client never invents labels of its own.
 */
export function causeValueForLabel(label: string): string {
  return label.toLowerCase().replace(/[\s/-]+/g, "_");
}

export function harmKindForLabel(label: string): HarmKind {
  const kind = label
    .toLowerCase()
    .replace(/\s+harm$/, "")
    .replace(/[\s/-]+/g, "_");
  return kind as HarmKind;
}

export interface FieldErrors {
  [field: string]: string;
}

interface HarmState {
  present: boolean;
  description: string;
}

const ISO_DATE_RE = /^\d{4}-\d{2}-\d{2}(T\d{2}:\d{2}(:\d{2})?)?$/;

/**
 * Client-side mirror of the incident document: all 26 public fields plus
 * the 4 submitter fields, with per-field validation state. The client
 * checks are a strict subset of the server's; a clean client form can still
 * be refused by the server (e.g. sector vocabulary), and such refusals are
 * anchored back onto fields via applyServerViolations.
 */
export class FormModel {
  title = "";
  summary = "";
  date = "";
  locations = ""; // "US: region; GB" style, parsed on read
  affectedParties = "";
  sectors = "";
  issues = "";
  applicationNames = "";
  applicationVersion = "";
  technologies = "";
  purposes = "";
  deployer = "";
  developer = "";
  transparencyNote = "";
  severity = "";
  causes = new Set<string>();
  harms: Record<HarmKind, HarmState>;
  link = "";
  submitterName = "";
  submitterEmail = "";
  newsSources = "";
  extraInfo = "";

  serverErrors: FieldErrors = {};

  constructor() {
    this.harms = Object.fromEntries(
      HARM_KINDS.map((kind) => [kind, { present: false, description: "" }]),
    ) as Record<HarmKind, HarmState>;
  }

  summaryWordCount(): number {
    return countWords(this.summary);
  }

  summaryWithinLimit(): boolean {
    return this.summaryWordCount() <= SUMMARY_WORD_LIMIT;
  }

  /** Client-side validation: everything here is also enforced server-side. */
  validate(): FieldErrors {
    const errors: FieldErrors = {};
    if (!this.title.trim()) {
      errors.incident_title = "title is required";
    }
    if (!this.summaryWithinLimit()) {
      errors.incident_summary = `summary exceeds ${SUMMARY_WORD_LIMIT} words`;
    }
    if (this.date.trim() && !ISO_DATE_RE.test(this.date.trim())) {
      errors.incident_date = "use an ISO date (YYYY-MM-DD, optional time)";
    }
    for (const entry of splitList(this.locations)) {
      const country = entry.split(":", 1)[0]!.trim();
      if (!/^[A-Za-z]{2}$/.test(country)) {
        errors.incident_locations = "each location needs a two-letter country code";
        break;
      }
    }
    const link = this.link.trim();
    if (link && !/^https?:\/\/\S+$/.test(link)) {
      errors.incident_link = "must be an http(s) URL";
    }
    for (const kind of HARM_KINDS) {
      const harm = this.harms[kind];
      if (!harm.present && harm.description.trim()) {
        errors[`harms.${kind}`] = "description given but harm not marked present";
      }
    }
    return errors;
  }

  canSubmit(): boolean {
    return Object.keys(this.validate()).length === 0;
  }

  /** Build the canonical submission body (no incident_id; server allocates). */
  toDocument(): IncidentDocument {
    const harms = Object.fromEntries(
      HARM_KINDS.map((kind) => {
        const harm = this.harms[kind];
        const entry: { present: boolean; description?: string } = { present: harm.present };
        if (harm.present && harm.description.trim()) entry.description = harm.description.trim();
        return [kind, entry];
      }),
    ) as IncidentDocument["harms"];

    const doc: IncidentDocument = {
      incident_title: this.title.trim(),
      incident_summary: this.summary,
      incident_date: optional(this.date),
      incident_locations: splitList(this.locations).map((entry) => {
        const [country, ...rest] = entry.split(":");
        const region = rest.join(":").trim();
        return region
          ? { country: country!.trim().toUpperCase(), region }
          : { country: country!.trim().toUpperCase() };
      }),
      affected_parties: splitList(this.affectedParties),
      sectors_impacted: splitList(this.sectors).map((s) => s.toLowerCase()),
      incident_issues: splitList(this.issues),
      ai_application_names: splitList(this.applicationNames),
      application_version: optional(this.applicationVersion),
      application_technologies: splitList(this.technologies),
      application_purposes: splitList(this.purposes),
      application_deployer: optional(this.deployer),
      application_developer: optional(this.developer),
      // The transparency level enum is not served by /taxonomy, so the form
      // offers no picker for it: submissions go in as "unknown" (the schema
      // default) with the submitter's note preserved.
      application_transparency: this.transparencyNote.trim()
        ? { level: "unknown", note: this.transparencyNote.trim() }
        : { level: "unknown" },
      incident_severity: this.severity || null,
      incident_causes: [...this.causes],
      harms,
      incident_link: optional(this.link),
    };
    if (this.submitterName.trim()) doc.submitter_name = this.submitterName.trim();
    if (this.submitterEmail.trim()) doc.submitter_email = this.submitterEmail.trim();
    const sources = splitList(this.newsSources);
    if (sources.length) doc.incident_news_sources = sources;
    if (this.extraInfo.trim()) doc.submitter_extra_info = this.extraInfo.trim();
    return doc;
  }

  /** Anchor server violations back onto form fields. */
  applyServerViolations(violations: Violation[]): void {
    this.serverErrors = {};
    for (const violation of violations) {
      const field = anchorField(violation.field_path);
      const existing = this.serverErrors[field];
      this.serverErrors[field] = existing
        ? `${existing}; ${violation.message}`
        : violation.message;
    }
  }

  /** Combined per-field errors: client first, then server anchors. */
  fieldErrors(): FieldErrors {
    return { ...this.serverErrors, ...this.validate() };
  }
}

/** "a; b; c" -> ["a", "b", "c"] */
export function splitList(raw: string): string[] {
  return raw
    .split(";")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

function optional(raw: string): string | null {
  const trimmed = raw.trim();
  return trimmed ? trimmed : null;
}

/** "incident_locations[0].country" -> "incident_locations"; harms keep their kind. */
export function anchorField(fieldPath: string): string {
  const harmMatch = fieldPath.match(/^harms\.([a-z_]+)/);
  if (harmMatch) return `harms.${harmMatch[1]}`;
  return fieldPath.split(/[[.]/, 1)[0]!;
}

/** Severity labels served by /taxonomy are the wire values themselves. */
export function severityOptions(taxonomy: TaxonomyDoc): string[] {
  const category = taxonomy.categories.find((c) => c.name === "incident_severity");
  return category ? category.subcategories.map((s) => s.label) : [];
}

export function causeOptions(taxonomy: TaxonomyDoc): { label: string; value: string }[] {
  const category = taxonomy.categories.find((c) => c.name === "cause_of_failure");
  if (!category) return [];
  return category.subcategories.map((s) => ({ label: s.label, value: causeValueForLabel(s.label) }));
}

export function harmOptions(taxonomy: TaxonomyDoc): { label: string; kind: HarmKind }[] {
  const category = taxonomy.categories.find((c) => c.name === "type_of_harm");
  if (!category) return [];
  return category.subcategories.map((s) => ({ label: s.label, kind: harmKindForLabel(s.label) }));
}
