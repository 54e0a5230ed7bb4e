import { ApiClient } from "./api";
import { ReviewQueue } from "./reviewQueue";
import { SubmissionForm } from "./submissionForm";

/**
 * Single-page shell: one app for both roles, with capability-based
 * rendering. Entering a submitter key enables the submission tab; a
 * reviewer key additionally enables the triage tab. All vocabulary comes
 * from the service.
 */
export async function mountApp(container: HTMLElement, baseUrl: string): Promise<void> {
  container.innerHTML = `
    <header>
      <h1>Incident registry triage console</h1>
      <label>API key <input type="password" data-api-key></label>
      <button type="button" data-connect>Connect</button>
      <nav hidden data-tabs>
        <button type="button" data-tab="submit">Submit incident</button>
        <button type="button" data-tab="review">Review queue</button>
      </nav>
    </header>
    <main>
      <section data-view="submit" hidden></section>
      <section data-view="review" hidden></section>
    </main>
  `;
  const keyInput = container.querySelector("[data-api-key]") as HTMLInputElement;
  const tabs = container.querySelector("[data-tabs]") as HTMLElement;
  const submitView = container.querySelector('[data-view="submit"]') as HTMLElement;
  const reviewView = container.querySelector('[data-view="review"]') as HTMLElement;

  container.querySelector("[data-connect]")!.addEventListener("click", async () => {
    const client = new ApiClient(baseUrl, keyInput.value.trim() || undefined);
    const taxonomy = await client.fetchTaxonomy();
    submitView.innerHTML = "";
    reviewView.innerHTML = "";
    new SubmissionForm(submitView, client, taxonomy);
    const queue = new ReviewQueue(reviewView, client);
    tabs.hidden = false;
    submitView.hidden = false;
    for (const button of tabs.querySelectorAll<HTMLButtonElement>("[data-tab]")) {
      button.addEventListener("click", async () => {
        const tab = button.dataset.tab;
        submitView.hidden = tab !== "submit";
        reviewView.hidden = tab !== "review";
        if (tab === "review") await queue.load();
      });
    }
  });
}

declare global {
  interface Window {
    mountTriageApp?: typeof mountApp;
  }
}

if (typeof window !== "undefined") {
  window.mountTriageApp = mountApp;
}
