/** Entry point: pick or create a project, then mount the app shell. */

import { ApiClient } from "./api";
import { mountApp } from "./app";
import { apiBaseUrl } from "./config";
import { clear, el } from "./dom";
import "./styles.css";

async function bootstrap(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const api = new ApiClient(apiBaseUrl());

  let projects;
  try {
    projects = await api.listProjects();
  } catch {
    clear(root);
    root.appendChild(
      el("p", {
        class: "boot-error",
        text: `Cannot reach the meflex server at ${apiBaseUrl()}.`,
      }),
    );
    return;
  }

  if (projects.length > 0) {
    const app = mountApp(root, api);
    await app.open(projects[0].id);
    return;
  }

  const topics = await api.listTopics().catch(() => [] as string[]);
  clear(root);
  const title = el("input", {
    class: "new-project-title",
    placeholder: "Project title",
  });
  const topic = el("select", { class: "new-project-topic" });
  for (const label of topics) {
    const option = document.createElement("option");
    option.value = label;
    option.textContent = label;
    topic.appendChild(option);
  }
  root.appendChild(
    el("div", { class: "new-project" }, [
      el("h1", { text: "Start a business idea" }),
      title,
      topic,
      el("button", {
        class: "new-project-create",
        text: "Create project",
        onClick: async () => {
          const project = await api.createProject(
            title.value,
            topic.value || "general",
          );
          const app = mountApp(root, api);
          await app.open(project.id);
        },
      }),
    ]),
  );
}

void bootstrap();
