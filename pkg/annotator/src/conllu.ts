/**
 * CoNLL-U emission: ten tab-separated columns per token, one block per
 * sentence, `# req_id = <id>` comments tying blocks to their source rows,
 * and NER BIO tags in the MISC column (`NER=B-PERCENT`).
 */

import type { DepToken } from './depparse.js';

function safe(value: string): string {
  const cleaned = value.replace(/[\t\n\r]/g, ' ').trim();
  return cleaned === '' ? '_' : cleaned;
}

export function sentenceBlock(reqId: string, text: string, tokens: DepToken[]): string {
  const lines = [`# req_id = ${reqId}`, `# text = ${text.replace(/[\n\r]/g, ' ')}`];
  tokens.forEach((t, i) => {
    const misc = t.entity ? `NER=${t.entity}` : '_';
    lines.push(
      [
        String(i + 1),
        safe(t.form),
        safe(t.lemma).toLowerCase(),
        t.upos,
        '_',
        '_',
        String(t.head),
        t.deprel,
        '_',
        misc,
      ].join('\t')
    );
  });
  return lines.join('\n');
}

export function joinBlocks(blocks: string[]): string {
  return blocks.join('\n\n') + '\n';
}
