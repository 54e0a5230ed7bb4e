import type { ApiClient } from "./api";
import { ApiError } from "./api";
import type { IncidentDocument, IncidentEnvelope } from "./types";
import { REDACTED_FIELDS } from "./types";

/**
 * What redaction will publish: the record without the four submitter
 * fields. This mirrors the server's public view; the reviewer sees both
 * panes side by side before approving.
 */
export function publicPreview(record: IncidentDocument): IncidentDocument {
  const copy: IncidentDocument = JSON.parse(JSON.stringify(record));
  for (const field of REDACTED_FIELDS) {
    delete (copy as unknown as Record<string, unknown>)[field];
  }
  return copy;
}

function renderFieldList(doc: IncidentDocument): string {
  const rows: string[] = [];
  for (const [key, value] of Object.entries(doc)) {
    if (value === null || value === undefined) continue;
    const rendered =
      typeof value === "string" ? value : JSON.stringify(value);
    rows.push(
      `<div class="record-field" data-record-field="${key}"><dt>${key}</dt><dd>${escapeHtml(rendered)}</dd></div>`,
    );
  }
  return `<dl>${rows.join("")}</dl>`;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Reviewer triage console: queue of submitted and under-review incidents,
 * full unredacted detail beside a public-view preview, and the three review
 * actions. Rejection is blocked until a reason is entered. A 409 from a
 * stale item raises a banner prompting a refresh instead of mutating state.
 */
export class ReviewQueue {
  readonly root: HTMLElement;
  private client: ApiClient;
  items: IncidentEnvelope[] = [];
  selected: IncidentEnvelope | null = null;

  constructor(container: HTMLElement, client: ApiClient) {
    this.client = client;
    this.root = document.createElement("div");
    this.root.className = "review-queue";
    this.root.innerHTML = `
      <div class="stale-banner" data-stale-banner hidden>
        This item changed in another session. <button type="button" data-refresh>Refresh queue</button>
      </div>
      <ul class="queue-list" data-queue></ul>
      <div class="panes">
        <section class="detail-pane" data-pane="detail"><h3>Full record (reviewer view)</h3><div data-detail-body></div></section>
        <section class="preview-pane" data-pane="preview"><h3>Public view after redaction</h3><div data-preview-body></div></section>
      </div>
      <div class="actions" data-actions hidden>
        <button type="button" data-action="claim">Claim</button>
        <button type="button" data-action="approve">Approve &amp; publish</button>
        <input type="text" data-reject-reason placeholder="rejection reason (required)">
        <button type="button" data-action="reject" disabled>Reject</button>
        <span class="action-error" data-action-error></span>
      </div>
    `;
    container.appendChild(this.root);
    this.bind();
  }

  private bind(): void {
    this.root
      .querySelector("[data-refresh]")!
      .addEventListener("click", () => void this.load());
    const reason = this.reasonInput();
    reason.addEventListener("input", () => this.updateActionButtons());
    for (const action of ["claim", "approve", "reject"] as const) {
      this.actionButton(action).addEventListener("click", () => void this.act(action));
    }
  }

  queueList(): HTMLElement {
    return this.root.querySelector("[data-queue]") as HTMLElement;
  }

  staleBanner(): HTMLElement {
    return this.root.querySelector("[data-stale-banner]") as HTMLElement;
  }

  reasonInput(): HTMLInputElement {
    return this.root.querySelector("[data-reject-reason]") as HTMLInputElement;
  }

  actionButton(action: string): HTMLButtonElement {
    return this.root.querySelector(`[data-action="${action}"]`) as HTMLButtonElement;
  }

  detailBody(): HTMLElement {
    return this.root.querySelector("[data-detail-body]") as HTMLElement;
  }

  previewBody(): HTMLElement {
    return this.root.querySelector("[data-preview-body]") as HTMLElement;
  }

  /** Fetch submitted and under-review incidents (reviewer tier). */
  async load(): Promise<void> {
    const submitted = await this.client.listIncidents({ state: "submitted" });
    const underReview = await this.client.listIncidents({ state: "under_review" });
    this.items = [...submitted.items, ...underReview.items];
    this.staleBanner().hidden = true;
    this.renderQueue();
    if (this.selected) {
      const kept = this.items.find((i) => i.incident_id === this.selected!.incident_id);
      this.selected = kept ?? null;
    }
    if (!this.selected && this.items.length) this.select(this.items[0]!.incident_id);
    else this.renderSelection();
  }

  private renderQueue(): void {
    const list = this.queueList();
    list.innerHTML = "";
    for (const item of this.items) {
      const element = document.createElement("li");
      element.dataset.queueItem = item.incident_id;
      element.dataset.state = item.state;
      element.textContent = `${item.incident_id} [${item.state}] ${item.record.incident_title}`;
      element.addEventListener("click", () => this.select(item.incident_id));
      list.appendChild(element);
    }
  }

  select(incidentId: string): void {
    this.selected = this.items.find((i) => i.incident_id === incidentId) ?? null;
    this.renderSelection();
  }

  private renderSelection(): void {
    const actions = this.root.querySelector("[data-actions]") as HTMLElement;
    if (!this.selected) {
      this.detailBody().innerHTML = "";
      this.previewBody().innerHTML = "";
      actions.hidden = true;
      return;
    }
    const { record, state, events } = this.selected;
    const history = (events ?? [])
      .map(
        (event) =>
          `<li>${event.at} ${event.reviewer_id} ${event.action}${event.reason ? `: ${escapeHtml(event.reason)}` : ""}</li>`,
      )
      .join("");
    this.detailBody().innerHTML =
      `<p data-detail-state>state: ${state}</p>` +
      renderFieldList(record) +
      `<ul class="history">${history}</ul>`;
    this.previewBody().innerHTML = renderFieldList(publicPreview(record));
    actions.hidden = false;
    this.updateActionButtons();
  }

  updateActionButtons(): void {
    const state = this.selected?.state;
    this.actionButton("claim").disabled = state !== "submitted";
    this.actionButton("approve").disabled = state !== "under_review";
    const reasonGiven = this.reasonInput().value.trim().length > 0;
    this.actionButton("reject").disabled = state !== "under_review" || !reasonGiven;
  }

  async act(action: "claim" | "approve" | "reject"): Promise<void> {
    if (!this.selected) return;
    if (action === "reject" && !this.reasonInput().value.trim()) return;
    const errorSpan = this.root.querySelector("[data-action-error]") as HTMLElement;
    errorSpan.textContent = "";
    try {
      await this.client.review(
        this.selected.incident_id,
        action,
        action === "reject" ? this.reasonInput().value.trim() : "",
      );
      this.reasonInput().value = "";
      await this.load();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.staleBanner().hidden = false;
      } else if (error instanceof ApiError) {
        errorSpan.textContent = `${error.code}: ${error.message}`;
      } else {
        errorSpan.textContent = String(error);
      }
    }
  }
}
