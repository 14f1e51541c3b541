import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { HtmlAudioPlayer } from "./audio.js";

const mount = document.getElementById("app");
if (mount) {
  const app = new App(mount, new ApiClient(""), new HtmlAudioPlayer());
  void app.start();
}
