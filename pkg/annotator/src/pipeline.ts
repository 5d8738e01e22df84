/**
 * Wrapper around the wink-nlp pipeline: sentence splitting, tokenization,
 * lemmas, universal POS tags and named entities, flattened into plain
 * per-sentence token arrays. Entity labels are reduced to the measure set
 * the downstream consumer understands (DATE, TIME, PERCENT, MONEY,
 * CARDINAL, QUANTITY); wink's DURATION is folded into TIME.
 */

import { createRequire } from 'node:module';

const require = createRequire(import.meta.url);

export interface PlainToken {
  form: string;
  lemma: string;
  upos: string;
  /** BIO entity tag like "B-PERCENT", or null. */
  entity: string | null;
}

const ENTITY_MAP: Record<string, string> = {
  DATE: 'DATE',
  TIME: 'TIME',
  DURATION: 'TIME',
  PERCENT: 'PERCENT',
  MONEY: 'MONEY',
  CARDINAL: 'CARDINAL',
  QUANTITY: 'QUANTITY',
};

export interface Pipeline {
  modelName: string;
  annotate(text: string): PlainToken[][];
}

export function loadPipeline(modelName: string): Pipeline {
  let model: unknown;
  let winkNLP: any;
  try {
    winkNLP = require('wink-nlp');
    model = require(modelName);
  } catch (err) {
    throw new Error(
      `cannot load NLP pipeline model '${modelName}': ${(err as Error).message}`
    );
  }
  const nlp = winkNLP(model);
  const its = nlp.its;

  function annotate(text: string): PlainToken[][] {
    const doc = nlp.readDoc(text);

    // BIO tags keyed by document-level token index
    const bio = new Map<number, string>();
    doc.entities().each((entity: any) => {
      const label = ENTITY_MAP[entity.out(its.type) as string];
      if (!label) return;
      const [start, end] = entity.out(its.span) as [number, number];
      for (let i = start; i <= end; i += 1) {
        bio.set(i, `${i === start ? 'B' : 'I'}-${label}`);
      }
    });

    const sentences: PlainToken[][] = [];
    doc.sentences().each((sentence: any) => {
      const tokens: PlainToken[] = [];
      sentence.tokens().each((token: any) => {
        tokens.push({
          form: String(token.out(its.value)),
          lemma: String(token.out(its.lemma)),
          upos: String(token.out(its.pos)),
          entity: bio.get(token.index()) ?? null,
        });
      });
      if (tokens.length > 0) {
        sentences.push(tokens);
      }
    });
    return sentences;
  }

  return { modelName, annotate };
}
