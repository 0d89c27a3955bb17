import { createServer } from 'node:http';
import { AddressInfo } from 'node:net';

import { afterAll, describe, expect, it } from 'vitest';

import { HttpBackend, MockBackend, modelDim } from '../src/backends.js';

const mock = new MockBackend('clip-vit-b16', 512);

describe('model dims', () => {
  it('knows the published widths', () => {
    expect(modelDim('clip-vit-b16')).toBe(512);
    expect(modelDim('clip-vit-l14')).toBe(768);
  });

  it('takes an explicit override for anything else', () => {
    expect(modelDim('some-new-checkpoint', 64)).toBe(64);
    expect(() => modelDim('some-new-checkpoint')).toThrow(/set "dim"/);
  });
});

describe('mock backend', () => {
  it('is byte-identical for the identical string', async () => {
    const a = await mock.embedText('a photo of a dog');
    const b = await mock.embedText('a photo of a dog');
    expect(Buffer.compare(Buffer.from(a.buffer), Buffer.from(b.buffer))).toBe(0);
  });

  it('separates different strings and kinds', async () => {
    const text = await mock.embedText('dog');
    const other = await mock.embedText('cat');
    const image = await mock.embedImage(Buffer.from('dog'));
    expect(Buffer.compare(Buffer.from(text.buffer), Buffer.from(other.buffer))).not.toBe(0);
    expect(Buffer.compare(Buffer.from(text.buffer), Buffer.from(image.buffer))).not.toBe(0);
  });

  it('emits unit-norm float32 vectors', async () => {
    const v = await mock.embedText('anything at all');
    expect(v.length).toBe(512);
    let ss = 0;
    for (const x of v) ss += x * x;
    expect(Math.abs(Math.sqrt(ss) - 1)).toBeLessThan(1e-5);
  });

  it('draws deterministic well-formed pseudo-detections', async () => {
    const labels = ['dog', 'cat', 'car'];
    const bytes = Buffer.from('image-payload');
    const first = await mock.detectBoxes(bytes, labels);
    const second = await mock.detectBoxes(bytes, labels);
    expect(second).toEqual(first);
    expect(first.length).toBeGreaterThanOrEqual(1);
    expect(first.length).toBeLessThanOrEqual(3);
    for (const box of first) {
      expect(box.bbox[0]).toBeLessThan(box.bbox[2]);
      expect(box.bbox[1]).toBeLessThan(box.bbox[3]);
      expect(box.scores.length).toBe(labels.length);
      expect(Math.max(...box.scores)).toBeGreaterThan(1);
    }
  });
});

describe('http backend', () => {
  const server = createServer((req, res) => {
    let body = '';
    req.on('data', (chunk) => { body += chunk; });
    req.on('end', () => {
      if (req.url === '/embed/text') {
        const { text } = JSON.parse(body);
        // dyadic components survive the float32 round-trip exactly
        const embedding = [text.length / 16, 1, 0];
        res.setHeader('content-type', 'application/json');
        res.end(JSON.stringify({ embedding }));
      } else {
        res.statusCode = 500;
        res.end('boom');
      }
    });
  });
  const ready = new Promise<string>((resolve) => {
    server.listen(0, '127.0.0.1', () => {
      const { port } = server.address() as AddressInfo;
      resolve(`http://127.0.0.1:${port}`);
    });
  });
  afterAll(() => new Promise<void>((resolve) => { server.close(() => resolve()); }));

  it('fetches embeddings and checks their width', async () => {
    const url = await ready;
    const backend = new HttpBackend(url, 'remote-model', 3);
    const v = await backend.embedText('hello');
    expect(Array.from(v)).toEqual([0.3125, 1, 0]);

    const wrong = new HttpBackend(url, 'remote-model', 7);
    await expect(wrong.embedText('hello')).rejects.toThrow(/expected 7/);
  });

  it('surfaces server errors', async () => {
    const url = await ready;
    const backend = new HttpBackend(url, 'remote-model', 3);
    await expect(backend.embedImage(Buffer.from('x'))).rejects.toThrow(/500/);
  });
});
