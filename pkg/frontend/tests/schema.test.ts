import { describe, expect, it } from "vitest";

import { isFlatBandRow, parseBandCsv, SchemaError } from "../src/schema.js";

const HEADER = "# lieb-spectra bands v1";
const COLUMNS = "model,p,q,alpha,t_or_lambda,band_index,e_lo,e_hi";

function csv(...rows: string[]): string {
  return [HEADER, COLUMNS, ...rows].join("\n") + "\n";
}

describe("parseBandCsv", () => {
  it("parses well-formed rows", () => {
    const rows = parseBandCsv(
      csv("lieb,1,2,0.5,1,0,-2.61,-1.08", "lieb,1,2,0.5,1,1,0,0"),
    );
    expect(rows).toHaveLength(2);
    expect(rows[0].model).toBe("lieb");
    expect(rows[0].q).toBe(2);
    expect(rows[1].eLo).toBe(0);
    expect(isFlatBandRow(rows[1])).toBe(true);
    expect(isFlatBandRow(rows[0])).toBe(false);
  });

  it("rejects a bad header with line 1", () => {
    try {
      parseBandCsv("nonsense\n" + COLUMNS + "\n");
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(SchemaError);
      expect((err as SchemaError).line).toBe(1);
    }
  });

  it("rejects a wrong field count with the offending line number", () => {
    try {
      parseBandCsv(csv("lieb,1,2,0.5,1,0,-2.61,-1.08", "lieb,1,2,0.5"));
      expect.unreachable();
    } catch (err) {
      expect((err as SchemaError).line).toBe(4);
    }
  });

  it("rejects non-numeric fields", () => {
    expect(() => parseBandCsv(csv("lieb,1,2,0.5,1,0,abc,-1.08"))).toThrowError(/e_lo/);
  });

  it("rejects inverted intervals", () => {
    expect(() => parseBandCsv(csv("lieb,1,2,0.5,1,0,2.0,1.0"))).toThrowError(/e_hi < e_lo/);
  });

  it("skips blank lines", () => {
    const rows = parseBandCsv(csv("lieb,1,2,0.5,1,0,-1,1", "", ""));
    expect(rows).toHaveLength(1);
  });
});
