/** A fetch stub programmed with route handlers, for unit-testing screens. */

export type Handler = (init?: RequestInit) => {
  status?: number;
  body: unknown;
};

export function fetchStub(routes: Record<string, Handler>) {
  const calls: string[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const key = `${method} ${url}`;
    calls.push(key);
    const handler = routes[key];
    if (!handler) {
      return new Response(
        JSON.stringify({ error: "NotStubbed", message: key }),
        { status: 500, headers: { "Content-Type": "application/json" } },
      );
    }
    const { status = 200, body } = handler(init);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { impl, calls };
}
