/**
 * Batch annotation: CSV rows in, CoNLL-U blocks out, in input order.
 * Multi-sentence requirements yield one block per sentence under a shared
 * req_id. Rows with empty text were already dropped by the CSV reader;
 * rows whose text produces no tokens are skipped with a warning too.
 */

import { loadRequirementsCsv, type CsvRow } from './csv.js';
import { assignHeads } from './depparse.js';
import { joinBlocks, sentenceBlock } from './conllu.js';
import type { Pipeline } from './pipeline.js';

export interface AnnotationJob {
  inputCsv: string;
  modelName: string;
  batchSize: number;
}

export interface AnnotationResult {
  conllu: string;
  annotatedReqIds: string[];
  warnings: string[];
}

export function annotateRows(
  pipeline: Pipeline,
  rows: CsvRow[],
  batchSize = 32
): AnnotationResult {
  const blocks: string[] = [];
  const annotated: string[] = [];
  const warnings: string[] = [];
  for (let offset = 0; offset < rows.length; offset += Math.max(1, batchSize)) {
    const batch = rows.slice(offset, offset + Math.max(1, batchSize));
    for (const row of batch) {
      const sentences = pipeline.annotate(row.text);
      if (sentences.length === 0) {
        warnings.push(`row ${row.rowNumber} (${row.reqId}): no tokens, skipped`);
        continue;
      }
      for (const sentence of sentences) {
        const parsed = assignHeads(sentence);
        const text = sentence.map((t) => t.form).join(' ');
        blocks.push(sentenceBlock(row.reqId, text, parsed));
      }
      annotated.push(row.reqId);
    }
  }
  return { conllu: joinBlocks(blocks), annotatedReqIds: annotated, warnings };
}

export function annotateCsv(
  pipeline: Pipeline,
  csvContent: string,
  batchSize = 32
): AnnotationResult {
  const { rows, skippedRows } = loadRequirementsCsv(csvContent);
  const result = annotateRows(pipeline, rows, batchSize);
  const skipWarnings = skippedRows.map(
    (rowNumber) => `row ${rowNumber}: empty requirement text, skipped`
  );
  return { ...result, warnings: [...skipWarnings, ...result.warnings] };
}
