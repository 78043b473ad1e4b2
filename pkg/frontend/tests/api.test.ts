import { afterEach, describe, expect, it, vi } from 'vitest';

import {
  ApiError,
  classNameOf,
  createSession,
  submitFeedback,
} from '../src/api.js';
import recorded from './recorded_payloads.json';

function stubFetch(status: number, body: unknown) {
  const impl = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  }));
  vi.stubGlobal('fetch', impl);
  return impl;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('createSession', () => {
  it('posts the report and returns the server view untouched', async () => {
    const impl = stubFetch(201, recorded.created);
    const view = await createSession('demo', '1.0', {
      title: 'Charge fails',
      description: 'BitUtility mangles the charge amount in PaymentGateway.',
      max_cycles: 2,
    });
    expect(impl).toHaveBeenCalledOnce();
    const [url, options] = impl.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe('/api/projects/demo/versions/1.0/sessions');
    expect(options.method).toBe('POST');
    expect(JSON.parse(String(options.body)).title).toBe('Charge fails');
    expect(view).toEqual(recorded.created);
  });
});

describe('submitFeedback', () => {
  it('returns the reformulated view; the named class is gone server-side', async () => {
    const impl = stubFetch(200, recorded.afterFeedback);
    const view = await submitFeedback('abc123', [
      { kind: 'non_existing_class', class_name: 'BitUtility' },
    ]);
    const [url, options] = impl.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe('/api/sessions/abc123/feedback');
    expect(JSON.parse(String(options.body))).toEqual([
      { kind: 'non_existing_class', class_name: 'BitUtility' },
    ]);
    expect(view.query.entities).not.toContain('BitUtility');
    expect(view.excluded).toContain('BitUtility');
    expect(view.cycle).toBe(1);
  });
});

describe('error handling', () => {
  it('maps error bodies onto ApiError', async () => {
    const { __status, ...body } = recorded.conflictError as {
      __status: number;
      code: string;
      message: string;
      retriable: boolean;
    };
    stubFetch(__status, body);
    const attempt = submitFeedback('abc123', [
      { kind: 'non_buggy_class', class_name: 'AuditTrail' },
    ]);
    await expect(attempt).rejects.toBeInstanceOf(ApiError);
    await attempt.catch((err: ApiError) => {
      expect(err.status).toBe(409);
      expect(err.body.code).toBe('conflict');
    });
  });
});

describe('classNameOf', () => {
  it('strips directories and the .java suffix', () => {
    expect(classNameOf('PaymentGateway.java')).toBe('PaymentGateway');
    expect(classNameOf('com/demo/shop/AuditTrail.java')).toBe('AuditTrail');
    expect(classNameOf('README')).toBe('README');
  });
});
