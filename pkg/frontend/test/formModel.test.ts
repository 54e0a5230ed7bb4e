import { describe, expect, it } from "vitest";

import {
  anchorField,
  causeValueForLabel,
  FormModel,
  harmKindForLabel,
  splitList,
} from "../src/formModel";
import { HARM_KINDS } from "../src/types";

function words(n: number): string {
  return Array.from({ length: n }, (_, i) => `w${i}`).join(" ");
}

function filledModel(): FormModel {
  const model = new FormModel();
  model.title = "Grid outage";
  model.summary = "An automated balancer shed the wrong feeder.";
  model.date = "2024-02-01";
  model.severity = "High";
  return model;
}

describe("FormModel validation", () => {
  it("requires a title", () => {
    const model = filledModel();
    model.title = "   ";
    expect(model.validate()).toHaveProperty("incident_title");
    expect(model.canSubmit()).toBe(false);
  });

  it("enforces the 250-word summary boundary", () => {
    const model = filledModel();
    model.summary = words(250);
    expect(model.canSubmit()).toBe(true);
    model.summary = words(251);
    expect(model.summaryWithinLimit()).toBe(false);
    expect(model.validate()).toHaveProperty("incident_summary");
  });

  it("rejects malformed dates and links client-side", () => {
    const model = filledModel();
    model.date = "February 1st";
    expect(model.validate()).toHaveProperty("incident_date");
    model.date = "2024-02-01";
    model.link = "ftp://example.org";
    expect(model.validate()).toHaveProperty("incident_link");
  });

  it("flags a harm description without the flag", () => {
    const model = filledModel();
    model.harms.physical.description = "injuries";
    expect(model.validate()).toHaveProperty("harms.physical");
    model.harms.physical.present = true;
    expect(model.canSubmit()).toBe(true);
  });
});

describe("FormModel document", () => {
  it("builds a canonical submission body", () => {
    const model = filledModel();
    model.locations = "us: California; DE";
    model.sectors = "Energy";
    model.causes.add("ai_misconfiguration");
    model.harms.economic.present = true;
    model.harms.economic.description = "revenue loss";
    model.submitterName = "A. Person";
    const doc = model.toDocument();
    expect(doc.incident_id).toBeUndefined();
    expect(doc.incident_locations).toEqual([
      { country: "US", region: "California" },
      { country: "DE" },
    ]);
    expect(doc.sectors_impacted).toEqual(["energy"]);
    expect(doc.incident_severity).toBe("High");
    expect(doc.incident_causes).toEqual(["ai_misconfiguration"]);
    expect(doc.harms.economic).toEqual({ present: true, description: "revenue loss" });
    expect(doc.harms.physical).toEqual({ present: false });
    expect(doc.application_transparency).toEqual({ level: "unknown" });
    expect(doc.submitter_name).toBe("A. Person");
    expect(doc.submitter_email).toBeUndefined();
  });

  it("omits empty redacted fields entirely", () => {
    const doc = filledModel().toDocument();
    expect("submitter_name" in doc).toBe(false);
    expect("submitter_email" in doc).toBe(false);
    expect("incident_news_sources" in doc).toBe(false);
    expect("submitter_extra_info" in doc).toBe(false);
  });
});

describe("server violation anchoring", () => {
  it("anchors SUMMARY_TOO_LONG to the summary field", () => {
    const model = filledModel();
    model.applyServerViolations([
      { field_path: "incident_summary", code: "SUMMARY_TOO_LONG", message: "too long" },
    ]);
    expect(model.fieldErrors().incident_summary).toBe("too long");
  });

  it("anchors indexed and nested paths to their field", () => {
    expect(anchorField("sectors_impacted[2]")).toBe("sectors_impacted");
    expect(anchorField("incident_locations[0].country")).toBe("incident_locations");
    expect(anchorField("harms.physical")).toBe("harms.physical");
    expect(anchorField("application_transparency.note")).toBe("application_transparency");
  });
});

describe("taxonomy label folding", () => {
  it("maps served cause labels to wire values", () => {
    expect(causeValueForLabel("AI Misconfiguration")).toBe("ai_misconfiguration");
    expect(causeValueForLabel("Predictive Maintenance Error")).toBe("predictive_maintenance_error");
    expect(causeValueForLabel("Security Vulnerability")).toBe("security_vulnerability");
    expect(causeValueForLabel("Human-Related AI Errors")).toBe("human_related_ai_errors");
  });

  it("maps served harm labels to the eight harm kinds", () => {
    const labels = [
      "Physical Harm",
      "Environmental Harm",
      "Property Harm",
      "Psychological Harm",
      "Reputational Harm",
      "Economic Harm",
      "Legal/Regulatory Harm",
      "Human Rights Harm",
    ];
    expect(labels.map(harmKindForLabel)).toEqual([...HARM_KINDS]);
  });
});

describe("splitList", () => {
  it("splits on semicolons and trims", () => {
    expect(splitList(" a ;b; ;c ")).toEqual(["a", "b", "c"]);
    expect(splitList("")).toEqual([]);
  });
});
