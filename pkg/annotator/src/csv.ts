/**
 * Minimal RFC-4180 reader for the requirements CSV schema.
 *
 * The header must be exactly ProjectID,RequirementText,Class. req_ids are
 * synthesized as `<ProjectID>-<ordinal>` where the ordinal counts data
 * rows from 1 — the same rule the downstream loader applies, so the two
 * sides agree on ids without coordination.
 */

export interface CsvRow {
  reqId: string;
  projectId: string;
  text: string;
  label: string;
  /** 1-based CSV row number (header is row 1). */
  rowNumber: number;
}

export const CSV_HEADER = ['ProjectID', 'RequirementText', 'Class'];

export function parseCsv(content: string): string[][] {
  const rows: string[][] = [];
  let field = '';
  let row: string[] = [];
  let inQuotes = false;
  let i = 0;
  const push = () => {
    row.push(field);
    field = '';
  };
  const endRow = () => {
    push();
    rows.push(row);
    row = [];
  };
  while (i < content.length) {
    const ch = content[i];
    if (inQuotes) {
      if (ch === '"') {
        if (content[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ',') {
      push();
      i += 1;
    } else if (ch === '\r') {
      i += 1; // swallow; \n ends the row
    } else if (ch === '\n') {
      endRow();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || row.length > 0) {
    endRow();
  }
  // drop fully empty trailing rows
  return rows.filter((r) => r.length > 1 || r[0].trim() !== '');
}

export interface LoadResult {
  rows: CsvRow[];
  /** CSV row numbers whose RequirementText was empty (skipped, warned). */
  skippedRows: number[];
}

export function loadRequirementsCsv(content: string): LoadResult {
  const parsed = parseCsv(content);
  if (parsed.length === 0) {
    throw new Error('empty CSV: no header row');
  }
  const header = parsed[0].map((h) => h.trim().replace(/^﻿/, ''));
  if (header.join(',') !== CSV_HEADER.join(',')) {
    throw new Error(
      `bad header: expected ${CSV_HEADER.join(',')}, got ${header.join(',')}`
    );
  }
  const rows: CsvRow[] = [];
  const skippedRows: number[] = [];
  let ordinal = 0;
  for (let r = 1; r < parsed.length; r += 1) {
    const cells = parsed[r];
    const rowNumber = r + 1;
    if (cells.length !== 3) {
      throw new Error(
        `row ${rowNumber}: expected 3 columns, got ${cells.length}`
      );
    }
    const [projectId, text, label] = cells.map((c) => c.trim());
    ordinal += 1; // every data row consumes an ordinal, even if skipped
    if (text === '') {
      skippedRows.push(rowNumber);
      continue;
    }
    rows.push({
      reqId: `${projectId}-${ordinal}`,
      projectId,
      text,
      label,
      rowNumber,
    });
  }
  return { rows, skippedRows };
}
