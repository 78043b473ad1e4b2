// DOM wiring: one in-flight mutation at a time, session id in the URL
// hash, server responses re-rendered wholesale (the server is the source
// of truth; conflicts just refresh the view).

import {
  ApiError,
  classNameOf,
  confirmFile,
  createSession,
  FeedbackKind,
  getSession,
  SessionView,
  submitFeedback,
} from './api.js';
import { renderError, renderPending, renderSession } from './render.js';

const main = document.getElementById('session-root') as HTMLElement;
const banner = document.getElementById('banner') as HTMLElement;
const form = document.getElementById('report-form') as HTMLFormElement;

let current: SessionView | null = null;
let pending = false;

function show(view: SessionView): void {
  current = view;
  window.location.hash = `#/sessions/${view.session_id}`;
  main.innerHTML = renderSession(view);
  banner.innerHTML = '';
}

function fail(err: unknown): void {
  if (err instanceof ApiError) {
    banner.innerHTML = renderError(err.body);
    if (err.body.code === 'conflict' && current) {
      void refresh(current.session_id);
    }
  } else {
    banner.innerHTML = renderError({
      code: 'network',
      message: String(err),
      retriable: true,
    });
  }
}

async function mutate(action: () => Promise<SessionView>): Promise<void> {
  if (pending) {
    return;
  }
  pending = true;
  banner.innerHTML = renderPending();
  try {
    show(await action());
  } catch (err) {
    fail(err);
  } finally {
    pending = false;
  }
}

async function refresh(sessionId: string): Promise<void> {
  try {
    show(await getSession(sessionId));
  } catch (err) {
    fail(err);
  }
}

form.addEventListener('submit', (event) => {
  event.preventDefault();
  const data = new FormData(form);
  const title = String(data.get('title') ?? '').trim();
  const description = String(data.get('description') ?? '').trim();
  if (!title && !description) {
    banner.innerHTML = renderError({
      code: 'validation',
      message: 'The report text must not be empty.',
      retriable: false,
    });
    return;
  }
  void mutate(() =>
    createSession(String(data.get('project')), String(data.get('version')), {
      title,
      description,
      max_cycles: Number(data.get('max_cycles') || 1),
    }),
  );
});

main.addEventListener('click', (event) => {
  const target = event.target as HTMLElement;
  const action = target.dataset.action;
  if (!action || !current || target.hasAttribute('disabled')) {
    return;
  }
  const sessionId = current.session_id;
  if (action === 'not-found' && target.dataset.class) {
    void mutate(() =>
      submitFeedback(sessionId, [
        { kind: 'non_existing_class' as FeedbackKind, class_name: target.dataset.class! },
      ]),
    );
  } else if (action === 'not-buggy' && target.dataset.file) {
    void mutate(() =>
      submitFeedback(sessionId, [
        {
          kind: 'non_buggy_class' as FeedbackKind,
          class_name: classNameOf(target.dataset.file!),
        },
      ]),
    );
  } else if (action === 'confirm' && target.dataset.file) {
    void mutate(() => confirmFile(sessionId, target.dataset.file!));
  }
});

const match = window.location.hash.match(/^#\/sessions\/([0-9a-f]+)$/);
if (match) {
  void refresh(match[1]);
}
