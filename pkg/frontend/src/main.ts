/** Browser bootstrap: wires the controllers to a minimal DOM.
 *
 * Served as a static page next to the experiment service; all traffic
 * goes through the service's HTTP API on the same origin.
 */
import { ApiClient } from "./api.js";
import { BrowserAudio } from "./audio.js";
import { DashboardController } from "./dashboard.js";
import { RATING_LABELS, RatingController } from "./rating.js";
import { TrialController } from "./trial.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
}

async function runTrials(api: ApiClient, token: string): Promise<void> {
  const audio = new BrowserAudio();
  const controller = new TrialController(api, audio, audio);
  const slider = el("slider") as HTMLInputElement;
  const status = el("status");
  const submit = el("submit") as HTMLButtonElement;

  const refresh = () => {
    const t = controller.trial;
    if (controller.state === "empty") {
      status.textContent = "No trials available — thank you!";
      slider.disabled = submit.disabled = true;
      return;
    }
    const { loaded, total } = controller.prefetchProgress;
    const practice = controller.isPractice ? " (practice)" : "";
    const notice = controller.expiryNotice
      ? " Your previous trial expired; here is a fresh one."
      : "";
    status.textContent =
      controller.state === "prefetching"
        ? `Loading stimuli ${loaded}/${total}…`
        : `Make the speaker sound like: ${t?.emotion}${practice}.${notice}`;
    slider.disabled = controller.state !== "ready";
    submit.disabled = !controller.canSubmit;
    slider.value = String(controller.sliderIndex);
  };

  slider.min = "0";
  slider.max = "31";
  slider.oninput = () => {
    void controller.moveSlider(Number(slider.value)).then(refresh);
  };
  submit.onclick = () => {
    void controller
      .submit()
      .then(() => controller.loadNext())
      .then(refresh);
  };
  await controller.start(token);
  refresh();
}

async function runRatings(api: ApiClient, token: string): Promise<void> {
  const controller = new RatingController(api, new BrowserAudio());
  const status = el("status");
  const buttons = el("buttons");

  const refresh = () => {
    if (controller.state === "empty") {
      status.textContent = "All stimuli rated — thank you!";
      buttons.replaceChildren();
      return;
    }
    status.textContent =
      controller.state === "ready"
        ? `How much does this sound like ${controller.rating?.probed_emotion}?`
        : "Listen…";
    buttons.replaceChildren(
      ...RATING_LABELS.map((label, i) => {
        const b = document.createElement("button");
        b.textContent = label;
        b.disabled = !controller.canRespond;
        b.onclick = () => {
          void controller
            .choose(i + 1)
            .then(() => controller.loadNext())
            .then(refresh);
        };
        return b;
      }),
    );
  };
  await controller.start(token);
  refresh();
}

async function runDashboard(api: ApiClient): Promise<void> {
  const controller = new DashboardController(api);
  const table = el("chains");
  const render = () => {
    const rows = controller.view.map(
      (r) =>
        `<tr><td>${r.chainId}</td><td>${r.emotion}</td>` +
        `<td>${r.sentenceId}</td><td>${r.iterationLabel}</td>` +
        `<td>${r.freeDimension ?? "—"}</td><td>${r.progressLabel}</td>` +
        `<td>${r.statusBadge}</td></tr>`,
    );
    table.innerHTML =
      "<tr><th>chain</th><th>emotion</th><th>sentence</th>" +
      "<th>iteration</th><th>dim</th><th>responses</th><th>status</th></tr>" +
      rows.join("");
    el("stale").textContent = controller.stale ? "stale" : "live";
  };
  (el("terminate") as HTMLButtonElement).onclick = () => {
    const ok = window.confirm("Terminate the experiment?");
    void controller.terminate(ok).then(render);
  };
  window.setInterval(render, 1000);
  await controller.start();
  render();
}

export async function boot(): Promise<void> {
  const api = new ApiClient((url, init) => fetch(url, init));
  const page = document.body.dataset.page;
  if (page === "dashboard") {
    await runDashboard(api);
    return;
  }
  const token = await api.openSession();
  if (page === "rating") await runRatings(api, token);
  else await runTrials(api, token);
}

if (typeof document !== "undefined" && document.body?.dataset.page) {
  void boot();
}
