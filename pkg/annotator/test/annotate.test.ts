import { describe, expect, it } from 'vitest';

import { annotateCsv } from '../src/annotate.js';
import { loadPipeline } from '../src/pipeline.js';

const pipeline = loadPipeline('wink-eng-lite-web-model');

const HEADER = 'ProjectID,RequirementText,Class\n';

/** Parse emitted CoNLL-U back into blocks and validate the format. */
function validateConllu(conllu: string): Map<string, string[][][]> {
  const byReqId = new Map<string, string[][][]>();
  for (const block of conllu.trim().split('\n\n')) {
    const lines = block.split('\n');
    const reqIdLine = lines.find((l) => l.startsWith('# req_id = '));
    expect(reqIdLine).toBeDefined();
    const reqId = reqIdLine!.slice('# req_id = '.length);
    const rows = lines
      .filter((l) => !l.startsWith('#'))
      .map((l) => l.split('\t'));
    rows.forEach((cols, i) => {
      expect(cols).toHaveLength(10);
      expect(Number(cols[0])).toBe(i + 1);
      const head = Number(cols[6]);
      expect(Number.isInteger(head)).toBe(true);
      expect(head).toBeGreaterThanOrEqual(0);
      expect(head).toBeLessThanOrEqual(rows.length);
    });
    expect(rows.filter((cols) => cols[6] === '0')).toHaveLength(1);
    const sentences = byReqId.get(reqId) ?? [];
    sentences.push(rows);
    byReqId.set(reqId, sentences);
  }
  return byReqId;
}

describe('annotateCsv', () => {
  it('covers every req_id and emits valid blocks', () => {
    const csv =
      HEADER +
      'P1,The system shall send a report to the manager.,F\n' +
      'P1,The interface should be simple to navigate.,US\n' +
      'P2,The application shall encrypt the password. The application shall also audit the session.,SE\n';
    const result = annotateCsv(pipeline, csv);
    const blocks = validateConllu(result.conllu);
    expect([...blocks.keys()].sort()).toEqual(['P1-1', 'P1-2', 'P2-3']);
    // the two-sentence requirement yields two blocks under one req_id
    expect(blocks.get('P2-3')).toHaveLength(2);
    expect(result.warnings).toEqual([]);
  });

  it('tags 98% with PERCENT entities', () => {
    const csv =
      HEADER +
      'G2,The system must be available to the users 98% of the time.,A\n';
    const result = annotateCsv(pipeline, csv);
    const blocks = validateConllu(result.conllu);
    const rows = blocks.get('G2-1')![0];
    const ninetyEight = rows.find((cols) => cols[1] === '98')!;
    const percent = rows.find((cols) => cols[1] === '%')!;
    expect(ninetyEight[9]).toBe('NER=B-PERCENT');
    expect(percent[9]).toBe('NER=I-PERCENT');
  });

  it('keeps the nsubj example intact end to end', () => {
    const csv =
      HEADER +
      'G1,The system shall send a verification email to the user.,F\n';
    const result = annotateCsv(pipeline, csv);
    const rows = validateConllu(result.conllu).get('G1-1')![0];
    const system = rows.find((cols) => cols[1] === 'system')!;
    expect(system[7]).toMatch(/^nsubj/);
    expect(rows[Number(system[6]) - 1][2]).toBe('send');
  });

  it('warns about and skips empty-text rows', () => {
    const csv = HEADER + 'P1,first req,F\nP1,,F\nP1,third req,F\n';
    const result = annotateCsv(pipeline, csv);
    expect(result.warnings).toHaveLength(1);
    expect(result.warnings[0]).toMatch(/empty requirement text/);
    expect(result.annotatedReqIds).toEqual(['P1-1', 'P1-3']);
  });

  it('is deterministic for a fixed pipeline model', () => {
    const csv = HEADER + 'P1,The system shall archive the audit trail.,F\n';
    expect(annotateCsv(pipeline, csv).conllu).toBe(
      annotateCsv(pipeline, csv).conllu
    );
  });

  it('lowercases emitted lemmas', () => {
    const csv = HEADER + 'P1,The System shall notify Users.,F\n';
    const rows = validateConllu(annotateCsv(pipeline, csv).conllu).get('P1-1')![0];
    for (const cols of rows) {
      expect(cols[2]).toBe(cols[2].toLowerCase());
    }
  });
});
