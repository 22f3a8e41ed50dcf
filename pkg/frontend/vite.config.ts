import { defineConfig, loadEnv } from "vite";

// forward /v1 to the recommendation service so the page can keep the
// same-origin default base URL during development
export default defineConfig(({ mode }) => {
  const env = loadEnv(mode, ".", "EXPLORE_");
  return {
    server: {
      proxy: {
        "/v1": {
          target: env.EXPLORE_API || "http://localhost:8942",
          changeOrigin: true,
        },
      },
    },
  };
});
