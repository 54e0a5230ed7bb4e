// End-to-end: the real DOM components against a real, fixture-seeded
// registry service over HTTP (service spawned per suite).
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { SubmissionForm } from "../src/submissionForm";
import { ReviewQueue, publicPreview } from "../src/reviewQueue";
import type { IncidentDocument, TaxonomyDoc } from "../src/types";
import { REDACTED_FIELDS } from "../src/types";
import { REVIEWER_KEY, SUBMITTER_KEY, startService, type RunningService } from "./service";

let service: RunningService;
let submitterClient: ApiClient;
let reviewerClient: ApiClient;
let taxonomy: TaxonomyDoc;

function seedDocument(title: string): IncidentDocument {
  return {
    incident_title: title,
    incident_summary: "Seeded incident for the end-to-end suite.",
    incident_date: "2024-03-05",
    incident_locations: [{ country: "US" }],
    affected_parties: ["Customers"],
    sectors_impacted: ["energy"],
    incident_issues: ["Reliability"],
    ai_application_names: ["Balancer"],
    application_version: null,
    application_technologies: ["Forecasting model"],
    application_purposes: ["Load balancing"],
    application_deployer: "Utility Co",
    application_developer: "Vendor Inc",
    application_transparency: { level: "unknown" },
    incident_severity: "High",
    incident_causes: ["ai_misconfiguration"],
    harms: {
      physical: { present: false },
      environmental: { present: false },
      property: { present: false },
      psychological: { present: false },
      reputational: { present: true },
      economic: { present: true, description: "outage penalties" },
      legal_regulatory: { present: false },
      human_rights: { present: false },
    },
    incident_link: null,
    submitter_name: "Seed Submitter",
    submitter_email: "seed@example.org",
    incident_news_sources: ["https://news.example.org/seed"],
    submitter_extra_info: "seeded by the e2e harness",
  };
}

function setInput(form: SubmissionForm, field: string, value: string): void {
  const element = form.input(field);
  element.value = value;
  element.dispatchEvent(new Event("input", { bubbles: true }));
  element.dispatchEvent(new Event("change", { bubbles: true }));
}

function words(n: number): string {
  return Array.from({ length: n }, (_, i) => `w${i}`).join(" ");
}

beforeAll(async () => {
  service = await startService();
  submitterClient = new ApiClient(service.baseUrl, SUBMITTER_KEY);
  reviewerClient = new ApiClient(service.baseUrl, REVIEWER_KEY);
  taxonomy = await submitterClient.fetchTaxonomy();

  // Seed: one published incident, one left in the submitted queue.
  const published = await submitterClient.submitIncident(seedDocument("Seed published incident"));
  await reviewerClient.review(published.incident_id, "claim");
  await reviewerClient.review(published.incident_id, "approve");
  await submitterClient.submitIncident(seedDocument("Seed queued incident"));
});

afterAll(() => {
  service?.stop();
});

describe("submission form against the live service", () => {
  function mountForm(): SubmissionForm {
    const container = document.createElement("div");
    document.body.appendChild(container);
    return new SubmissionForm(container, submitterClient, taxonomy);
  }

  it("renders exactly the taxonomy options served by /taxonomy", async () => {
    // Independent fetch: the DOM must match the service's vocabulary, not
    // any client-side constant.
    const served = (await (await fetch(`${service.baseUrl}/taxonomy`)).json()) as TaxonomyDoc;
    const form = mountForm();

    const severitySelect = form.input("incident_severity") as unknown as HTMLSelectElement;
    const domSeverities = [...severitySelect.options].map((o) => o.value).filter((v) => v);
    const servedSeverities = served.categories.find((c) => c.name === "incident_severity")!
      .subcategories.map((s) => s.label);
    expect(domSeverities).toEqual(servedSeverities);
    expect(domSeverities).toHaveLength(4);

    const domCauses = [...form.root.querySelectorAll<HTMLElement>("[data-cause]")].map(
      (el) => el.parentElement!.textContent!.trim(),
    );
    const servedCauses = served.categories.find((c) => c.name === "cause_of_failure")!
      .subcategories.map((s) => s.label);
    expect(domCauses).toEqual(servedCauses);

    const domHarms = [...form.root.querySelectorAll<HTMLElement>("[data-harm-row]")].map(
      (el) => el.querySelector("label")!.textContent!.trim(),
    );
    const servedHarms = served.categories.find((c) => c.name === "type_of_harm")!
      .subcategories.map((s) => s.label);
    expect(domHarms).toEqual(servedHarms);
    expect(domHarms).toHaveLength(8);
  });

  it("invalidates the counter and disables submit at the 251st word", () => {
    const form = mountForm();
    setInput(form, "incident_title", "Boundary check");
    setInput(form, "incident_summary", words(250));
    expect(form.wordCounter().dataset.state).toBe("ok");
    expect(form.wordCounter().textContent).toBe("250 / 250 words");
    expect(form.submitButton().disabled).toBe(false);

    setInput(form, "incident_summary", words(251));
    expect(form.wordCounter().dataset.state).toBe("over");
    expect(form.submitButton().disabled).toBe(true);
  });

  it("submits the selected severity enum value and publishes round-trip", async () => {
    const form = mountForm();
    setInput(form, "incident_title", "Severity picker incident");
    setInput(form, "incident_summary", "Short summary.");
    setInput(form, "incident_severity", "Critical");
    expect(form.submitButton().disabled).toBe(false);
    await form.submit();
    const banner = form.banner();
    expect(banner.hidden).toBe(false);
    expect(banner.dataset.kind).toBe("success");
    const id = banner.textContent!.match(/CDI-\d{6}/)![0];
    const envelope = await reviewerClient.getIncident(id);
    expect(envelope.record.incident_severity).toBe("Critical");
    expect(envelope.state).toBe("submitted");
  });

  it("anchors a server-only violation to the offending field", async () => {
    // The sector vocabulary lives server-side; the client cannot pre-check it.
    const form = mountForm();
    setInput(form, "incident_title", "Sector violation incident");
    setInput(form, "sectors_impacted", "astrology");
    expect(form.submitButton().disabled).toBe(false);
    await form.submit();
    const errorSpan = form.root.querySelector(
      '[data-error-for="sectors_impacted"]',
    ) as HTMLElement;
    expect(errorSpan.textContent).toContain("astrology");
  });
});

describe("review queue against the live service", () => {
  function mountQueue(client = reviewerClient): ReviewQueue {
    const container = document.createElement("div");
    document.body.appendChild(container);
    return new ReviewQueue(container, client);
  }

  it("shows full detail beside a redaction preview omitting all four submitter fields", async () => {
    const queue = mountQueue();
    await queue.load();
    const item = queue.items.find((i) => i.record.incident_title === "Seed queued incident")!;
    queue.select(item.incident_id);

    const detail = queue.detailBody();
    const preview = queue.previewBody();
    expect(detail.textContent).toContain("Seed Submitter");
    expect(detail.textContent).toContain("seed@example.org");
    for (const field of REDACTED_FIELDS) {
      expect(detail.querySelector(`[data-record-field="${field}"]`)).not.toBeNull();
      expect(preview.querySelector(`[data-record-field="${field}"]`)).toBeNull();
    }
    expect(preview.textContent).not.toContain("Seed Submitter");
    expect(preview.textContent).not.toContain("seed@example.org");
    // The preview matches what the server will actually publish.
    const published = await submitterClient.listIncidents();
    const publicRecord = published.items[0]!.record;
    for (const field of REDACTED_FIELDS) {
      expect(field in publicRecord).toBe(false);
    }
    expect(Object.keys(publicPreview(item.record)).sort()).toEqual(
      Object.keys(publicRecord).filter((k) => k !== "incident_id").concat(["incident_id"]).sort(),
    );
  });

  it("blocks reject until a reason is entered, then rejects and refreshes", async () => {
    const { incident_id } = await submitterClient.submitIncident(
      seedDocument("Reject flow incident"),
    );
    const queue = mountQueue();
    await queue.load();
    queue.select(incident_id);

    queue.actionButton("claim").click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    queue.select(incident_id);
    expect(queue.selected?.state).toBe("under_review");

    // No reason: the reject control is disabled and a forced call is a no-op.
    expect(queue.actionButton("reject").disabled).toBe(true);
    await queue.act("reject");
    expect((await reviewerClient.getIncident(incident_id)).state).toBe("under_review");

    queue.reasonInput().value = "data-center externality; not an AI incident";
    queue.reasonInput().dispatchEvent(new Event("input", { bubbles: true }));
    expect(queue.actionButton("reject").disabled).toBe(false);
    await queue.act("reject");

    expect(queue.items.some((i) => i.incident_id === incident_id)).toBe(false);
    const envelope = await reviewerClient.getIncident(incident_id);
    expect(envelope.state).toBe("rejected");
    expect(envelope.events!.at(-1)!.reason).toContain("not an AI incident");
  });

  it("raises the stale banner on a 409 from another session", async () => {
    const { incident_id } = await submitterClient.submitIncident(
      seedDocument("Stale tab incident"),
    );
    const queue = mountQueue();
    await queue.load();
    queue.select(incident_id);
    expect(queue.selected?.state).toBe("submitted");

    // Another tab claims the same incident first.
    await reviewerClient.review(incident_id, "claim");

    await queue.act("claim"); // stale: claim on an already-claimed incident
    expect(queue.staleBanner().hidden).toBe(false);
    expect((await reviewerClient.getIncident(incident_id)).state).toBe("under_review");

    // The banner's refresh path reloads the queue with current state.
    await queue.load();
    expect(queue.staleBanner().hidden).toBe(true);
    const refreshed = queue.items.find((i) => i.incident_id === incident_id);
    expect(refreshed?.state).toBe("under_review");
  });
});
