/**
 * Parser for the lieb-spectra band CSV schema:
 *
 *   # lieb-spectra bands v1
 *   model,p,q,alpha,t_or_lambda,band_index,e_lo,e_hi
 *   lieb,1,2,0.5,1,0,-2.61...,-1.08...
 *
 * Violations raise SchemaError carrying the 1-based offending line number.
 */

export const CSV_HEADER = "# lieb-spectra bands v1";
export const CSV_COLUMNS = [
  "model",
  "p",
  "q",
  "alpha",
  "t_or_lambda",
  "band_index",
  "e_lo",
  "e_hi",
] as const;

export interface BandRow {
  model: string;
  p: number;
  q: number;
  alpha: number;
  tOrLambda: number;
  bandIndex: number;
  eLo: number;
  eHi: number;
}

export class SchemaError extends Error {
  constructor(message: string, readonly line: number) {
    super(`line ${line}: ${message}`);
    this.name = "SchemaError";
  }
}

function parseNumber(field: string, name: string, line: number): number {
  const value = Number(field);
  if (field.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(`field ${name} is not a number: ${JSON.stringify(field)}`, line);
  }
  return value;
}

function parseInteger(field: string, name: string, line: number): number {
  const value = parseNumber(field, name, line);
  if (!Number.isInteger(value)) {
    throw new SchemaError(`field ${name} must be an integer: ${field}`, line);
  }
  return value;
}

export function parseBandCsv(text: string): BandRow[] {
  const lines = text.split(/\r?\n/);
  if (lines.length === 0 || lines[0].trim() !== CSV_HEADER) {
    throw new SchemaError(`expected header ${JSON.stringify(CSV_HEADER)}`, 1);
  }
  if (lines.length < 2 || lines[1].trim() !== CSV_COLUMNS.join(",")) {
    throw new SchemaError(`expected column row ${CSV_COLUMNS.join(",")}`, 2);
  }
  const rows: BandRow[] = [];
  for (let i = 2; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim() === "") continue;
    const fields = line.split(",");
    const lineNo = i + 1;
    if (fields.length !== CSV_COLUMNS.length) {
      throw new SchemaError(
        `expected ${CSV_COLUMNS.length} fields, got ${fields.length}`,
        lineNo,
      );
    }
    const row: BandRow = {
      model: fields[0],
      p: parseInteger(fields[1], "p", lineNo),
      q: parseInteger(fields[2], "q", lineNo),
      alpha: parseNumber(fields[3], "alpha", lineNo),
      tOrLambda: parseNumber(fields[4], "t_or_lambda", lineNo),
      bandIndex: parseInteger(fields[5], "band_index", lineNo),
      eLo: parseNumber(fields[6], "e_lo", lineNo),
      eHi: parseNumber(fields[7], "e_hi", lineNo),
    };
    if (row.eHi < row.eLo) {
      throw new SchemaError(`e_hi < e_lo (${row.eHi} < ${row.eLo})`, lineNo);
    }
    rows.push(row);
  }
  return rows;
}

export function isFlatBandRow(row: BandRow): boolean {
  return row.eLo === 0 && row.eHi === 0;
}
