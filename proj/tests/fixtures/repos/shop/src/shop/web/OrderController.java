package shop.web;

import shop.orders.Order;
import shop.orders.OrderService;

public class OrderController {
    private final OrderService service;

    public OrderController(OrderService service) {
        this.service = service;
    }

    public String create(Order order) {
        Order placed = service.placeOrder(order);
        return render(placed);
    }

    private String render(Order order) {
        return "{\"id\":\"" + order.getId() + "\"}";
    }
}
