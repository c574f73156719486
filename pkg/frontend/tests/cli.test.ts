import { execFileSync, spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const CLI = path.join(HERE, "..", "dist", "cli.js");
const FIXTURE = path.join(HERE, "fixtures", "lieb_t1_q20.csv");

function run(args: string[]) {
  return spawnSync("node", [CLI, ...args], { encoding: "utf8" });
}

function tmpFile(name: string): string {
  return path.join(fs.mkdtempSync(path.join(os.tmpdir(), "plotkit-")), name);
}

describe("plot-butterfly CLI", () => {
  it("renders the q<=20 butterfly with matching segment count", () => {
    const out = tmpFile("butterfly.svg");
    const proc = run([FIXTURE, "-o", out, "--flat-band"]);
    expect(proc.status).toBe(0);
    const svg = fs.readFileSync(out, "utf8");
    const dataRows = fs
      .readFileSync(FIXTURE, "utf8")
      .trim()
      .split("\n")
      .slice(2).length;
    expect((svg.match(/<line /g) ?? []).length).toBe(dataRows);
  });

  it("exits 2 on schema violations, naming the line", () => {
    const bad = tmpFile("bad.csv");
    fs.writeFileSync(
      bad,
      "# lieb-spectra bands v1\nmodel,p,q,alpha,t_or_lambda,band_index,e_lo,e_hi\nlieb,1,2,oops\n",
    );
    const proc = run([bad, "-o", tmpFile("x.svg")]);
    expect(proc.status).toBe(2);
    expect(proc.stderr).toContain("line 3");
  });

  it("exits 1 with a message when a filter leaves no rows", () => {
    const proc = run([FIXTURE, "-o", tmpFile("x.svg"), "--model", "amo"]);
    expect(proc.status).toBe(1);
    expect(proc.stderr).toContain("no rows");
  });

  it("rejects unknown extensions and missing args", () => {
    expect(run([FIXTURE, "-o", tmpFile("x.bmp")]).status).toBe(2);
    expect(run([]).status).toBe(2);
    expect(run([FIXTURE, "-o", tmpFile("x.svg"), "--bogus"]).status).toBe(2);
  });

  it("exits 2 when the input file is missing", () => {
    const proc = run(["/definitely/missing.csv", "-o", tmpFile("x.svg")]);
    expect(proc.status).toBe(2);
  });

  it("writes png output", () => {
    const out = tmpFile("butterfly.png");
    const proc = run([FIXTURE, "-o", out, "--width", "400", "--height", "300"]);
    expect(proc.status).toBe(0);
    const png = fs.readFileSync(out);
    expect(png.readUInt32BE(16)).toBe(400);
    expect(png.readUInt32BE(20)).toBe(300);
  });
});
