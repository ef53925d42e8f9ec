// Copyright 2026 The iiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// HTTP service for the interactive client.

// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "iiv/service.hpp"

#include <httplib.h>

#include <iostream>

int main()
{
  const iiv::ServiceConfig config = iiv::ServiceConfig::from_env();
  iiv::Service service(config);
  httplib::Server server;
  iiv::install_routes(server, service);
  std::cerr << "listening on " << config.host << ':' << config.port << '\n';
  if (!server.listen(config.host, config.port)) {
    std::cerr << "cannot bind " << config.host << ':' << config.port << '\n';
    return 1;
  }
  return 0;
}
