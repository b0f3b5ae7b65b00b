/** DOM application: login, dashboard, capture editor, certificate viewer. */

import { ApiClient, ApiError } from "./api.js";
import { CaptureSession } from "./capture.js";
import { TabLock } from "./tablock.js";
import type { DocumentRow } from "./types.js";

const UUID4_RE = /^[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}$/i;

export class App {
  private capture: CaptureSession | null = null;
  private lock: TabLock | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => this.route());
    this.route();
  }

  private route(): void {
    this.teardownEditor();
    const hash = window.location.hash || "#/login";
    const editMatch = hash.match(/^#\/edit\/(\d+)$/);
    if (hash.startsWith("#/verify")) {
      this.renderVerify();
    } else if (!this.api.authenticated) {
      this.renderLogin();
    } else if (editMatch) {
      void this.renderEditor(Number(editMatch[1]));
    } else {
      void this.renderDashboard();
    }
  }

  // -- login ------------------------------------------------------------

  private renderLogin(): void {
    this.root.innerHTML = `
      <section class="card narrow">
        <h1>Sign in</h1>
        <form id="login-form">
          <label>Username <input name="username" autocomplete="username" required></label>
          <label>Password <input name="password" type="password" autocomplete="current-password" required></label>
          <button type="submit">Login</button>
          <p class="error" id="login-error" hidden></p>
        </form>
        <p><a href="#/verify">Verify a certificate</a></p>
      </section>`;
    const form = this.query<HTMLFormElement>("#login-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const username = String(data.get("username") ?? "").trim();
      const password = String(data.get("password") ?? "");
      if (!username || !password) {
        this.showError("#login-error", "enter both username and password");
        return;
      }
      this.api
        .login(username, password)
        .then(() => {
          window.location.hash = "#/documents";
          this.route();
        })
        .catch((error) => this.showError("#login-error", describe(error)));
    });
  }

  // -- dashboard ----------------------------------------------------------

  private async renderDashboard(): Promise<void> {
    let rows: DocumentRow[];
    try {
      rows = await this.api.listDocuments();
    } catch (error) {
      this.handleAuthFailure(error);
      return;
    }
    const body = rows.length
      ? rows.map((row) => this.documentRow(row)).join("")
      : `<tr><td colspan="5" class="muted">No documents yet — create your first draft above.</td></tr>`;
    this.root.innerHTML = `
      <section class="card">
        <h1>Your documents</h1>
        <form id="create-form" class="inline">
          <input name="name" placeholder="New document name" required>
          <button type="submit">New Document</button>
          <span class="error" id="create-error" hidden></span>
        </form>
        <table>
          <thead><tr><th></th><th>name</th><th>created</th><th>modified</th><th>certificate</th></tr></thead>
          <tbody id="rows">${body}</tbody>
        </table>
        <p><a href="#/verify">Verify a certificate</a></p>
      </section>`;
    const form = this.query<HTMLFormElement>("#create-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const name = String(new FormData(form).get("name") ?? "").trim();
      if (!name) {
        this.showError("#create-error", "name must not be empty");
        return;
      }
      this.api
        .createDocument(name)
        .then((row) => {
          // Row appears without a reload.
          this.query("#rows").insertAdjacentHTML("beforeend", this.documentRow(row));
          form.reset();
        })
        .catch((error) => this.showError("#create-error", describe(error)));
    });
  }

  private documentRow(row: DocumentRow): string {
    const certificate = row.certificate_id
      ? `<a href="#/verify/${row.certificate_id}"><code>${row.certificate_id}</code></a>`
      : "<span class='muted'>—</span>";
    return `<tr>
      <td><a href="#/edit/${row.document_id}">Open</a></td>
      <td>${escapeHtml(row.name)}</td>
      <td>${escapeHtml(row.created)}</td>
      <td>${escapeHtml(row.modified)}</td>
      <td>${certificate}</td>
    </tr>`;
  }

  // -- editor -------------------------------------------------------------

  private async renderEditor(documentId: number): Promise<void> {
    let doc;
    try {
      doc = await this.api.getDocument(documentId);
    } catch (error) {
      this.handleAuthFailure(error);
      return;
    }

    this.lock = new TabLock(documentId, window.localStorage);
    if (!this.lock.acquire()) {
      this.lock = null;
      this.root.innerHTML = `
        <section class="card narrow">
          <h1>${escapeHtml(doc.name)}</h1>
          <p class="error">This document is open for editing in another tab.</p>
          <p><a href="#/documents">Back</a></p>
        </section>`;
      return;
    }

    this.root.innerHTML = `
      <section class="card">
        <p><a href="#/documents">Back</a></p>
        <h1>${escapeHtml(doc.name)} <button id="save">Save</button></h1>
        <textarea id="editor" spellcheck="false">${escapeHtml(doc.content)}</textarea>
        <p id="speed">Average Typing Speed: 0 CPM</p>
        <p class="error" id="editor-error" hidden></p>
        <div id="certificate" hidden>
          <h2>Certificate issued</h2>
          <p>Certificate ID: <code id="certificate-id"></code></p>
          <p id="stats-line"></p>
        </div>
      </section>`;

    const textarea = this.query<HTMLTextAreaElement>("#editor");
    const speed = this.query("#speed");
    this.capture = new CaptureSession({
      send: (events) => this.api.postEvents(documentId, events),
      onSpeed: (cpm) => {
        speed.textContent = `Average Typing Speed: ${Math.round(cpm)} CPM`;
      },
      onError: (error) => this.showError("#editor-error", describe(error)),
    });

    // A clipboard paste or text drop fires right before the input event that
    // applies it; remember the payload so that input is flagged as a paste.
    let pendingPaste: string | null = null;
    textarea.addEventListener("paste", (event) => {
      pendingPaste = event.clipboardData?.getData("text") ?? null;
    });
    textarea.addEventListener("drop", (event) => {
      pendingPaste = event.dataTransfer?.getData("text") ?? null;
    });
    textarea.addEventListener("input", () => {
      if (pendingPaste && textarea.value.includes(pendingPaste)) {
        this.capture?.notePaste(textarea.value, pendingPaste);
      } else {
        this.capture?.noteTyped(textarea.value);
      }
      pendingPaste = null;
    });

    this.query("#save").addEventListener("click", () => {
      void this.saveDocument(documentId);
    });
  }

  private async saveDocument(documentId: number): Promise<void> {
    try {
      await this.capture?.flush();
      const saved = await this.api.saveDocument(documentId);
      this.query("#certificate").removeAttribute("hidden");
      this.query("#certificate-id").textContent = saved.certificate_id;
      this.query("#stats-line").textContent = saved.stats_line;
    } catch (error) {
      this.showError("#editor-error", describe(error));
    }
  }

  private teardownEditor(): void {
    this.lock?.release();
    this.lock = null;
    this.capture = null;
  }

  // -- certificate viewer ----------------------------------------------------

  private renderVerify(): void {
    const fromHash = window.location.hash.match(/^#\/verify\/(.+)$/)?.[1] ?? "";
    this.root.innerHTML = `
      <section class="card">
        <h1>Certificate lookup</h1>
        <form id="verify-form" class="inline">
          <input name="certificate_id" placeholder="Certificate ID" value="${escapeHtml(fromHash)}" required>
          <button type="submit">Search</button>
          <span class="error" id="verify-error" hidden></span>
        </form>
        <div id="certificate-view"></div>
        <p><a href="#/documents">Back</a></p>
      </section>`;
    const form = this.query<HTMLFormElement>("#verify-form");
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.lookupCertificate(
        String(new FormData(form).get("certificate_id") ?? "").trim(),
      );
    });
    if (fromHash) {
      void this.lookupCertificate(fromHash);
    }
  }

  private async lookupCertificate(certificateId: string): Promise<void> {
    const view = this.query("#certificate-view");
    view.innerHTML = "";
    if (!UUID4_RE.test(certificateId)) {
      this.showError("#verify-error", "that does not look like a certificate id");
      return;
    }
    try {
      const cert = await this.api.getCertificate(certificateId);
      this.query("#verify-error").setAttribute("hidden", "");
      view.innerHTML = `
        <h2>${escapeHtml(cert.document_name)} , by ${escapeHtml(cert.author)}</h2>
        <p>${escapeHtml(cert.stats_line)}</p>
        <h3>Log</h3>
        <pre>${cert.log_lines.map(escapeHtml).join("\n")}</pre>`;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.showError("#verify-error", "certificate not found");
      } else {
        this.showError("#verify-error", describe(error));
      }
    }
  }

  // -- helpers ---------------------------------------------------------------

  private handleAuthFailure(error: unknown): void {
    if (error instanceof ApiError && error.status === 401) {
      this.api.logout();
      window.location.hash = "#/login";
      this.renderLogin();
      return;
    }
    this.root.innerHTML = `<section class="card"><p class="error">${escapeHtml(
      describe(error),
    )}</p></section>`;
  }

  private showError(selector: string, message: string): void {
    const element = this.query(selector);
    element.textContent = message;
    element.removeAttribute("hidden");
  }

  private query<T extends HTMLElement = HTMLElement>(selector: string): T {
    const element = this.root.querySelector<T>(selector);
    if (!element) {
      throw new Error(`missing element: ${selector}`);
    }
    return element;
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.code}: ${error.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
